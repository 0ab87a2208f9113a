#pragma once

// Special functions, adaptive quadrature on radial half-lines and a
// one-dimensional sup search over a logarithmic window.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <span>
#include <vector>

#include "blowup/error.hpp"

namespace blowup {

// ---------------------------------------------------------------------------
// Gamma function
// ---------------------------------------------------------------------------

namespace detail {

// Lanczos approximation, g = 7, nine terms.
inline constexpr double lanczos_g = 7.0;
inline constexpr std::array<double, 9> lanczos_coeffs = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

inline double log_gamma_lanczos(double x) {
    // valid for x >= 0.5
    const double z = x - 1.0;
    double sum = lanczos_coeffs[0];
    for (std::size_t k = 1; k < lanczos_coeffs.size(); ++k) sum += lanczos_coeffs[k] / (z + static_cast<double>(k));
    const double t = z + lanczos_g + 0.5;
    return 0.5 * std::log(2.0 * std::numbers::pi) + (z + 0.5) * std::log(t) - t + std::log(sum);
}

inline double log_gamma_stirling(double x) {
    // asymptotic series; truncation error below 1e-16 for x >= 15
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    const double series =
        inv * (1.0 / 12.0 -
               inv2 * (1.0 / 360.0 -
                       inv2 * (1.0 / 1260.0 - inv2 * (1.0 / 1680.0 - inv2 * (1.0 / 1188.0)))));
    return (x - 0.5) * std::log(x) - x + 0.5 * std::log(2.0 * std::numbers::pi) + series;
}

}  // namespace detail

/// Natural logarithm of Γ(x) for x > 0.
inline double log_gamma(double x) {
    if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("log_gamma requires a finite x > 0");
    if (x == 1.0 || x == 2.0) return 0.0;
    if (x >= 15.0) return detail::log_gamma_stirling(x);
    if (x >= 0.5) return detail::log_gamma_lanczos(x);
    // reflection keeps the Lanczos sum in its accurate range
    const double pi = std::numbers::pi;
    return std::log(pi / std::sin(pi * x)) - detail::log_gamma_lanczos(1.0 - x);
}

/// Γ(x) for moderate x; use log_gamma when the result may overflow.
inline double gamma_function(double x) { return std::exp(log_gamma(x)); }

// ---------------------------------------------------------------------------
// Quadrature
// ---------------------------------------------------------------------------

struct QuadratureConfig {
    double rel_tol = 1e-10;
    double abs_tol = 1e-14;
    int max_refinements = 30;  ///< maximal bisection depth of any subinterval

    void validate() const {
        if (!(rel_tol > 0.0) || !(abs_tol > 0.0) || max_refinements < 1)
            throw DomainError("QuadratureConfig requires rel_tol > 0, abs_tol > 0, max_refinements >= 1");
    }
};

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
    int evaluations = 0;
};

namespace detail {

inline constexpr std::array<double, 8> gk_nodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kronrod_weights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for nodes 1, 3, 5, 7 of the Kronrod set
inline constexpr std::array<double, 4> gauss_weights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double lo;
    double hi;
    double value;
    double error;
    int depth;
    int piece;
    bool operator<(const Segment& other) const { return error < other.error; }
};

// Single G7/K15 panel. g(piece, x) evaluates the (already transformed) integrand.
template <class G>
Segment gauss_kronrod_panel(const G& g, int piece, double lo, double hi, int depth) {
    const double center = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    const double fc = g(piece, center);
    double kronrod = kronrod_weights[7] * fc;
    double gauss = gauss_weights[3] * fc;
    for (int j = 0; j < 7; ++j) {
        const double dx = half * gk_nodes[j];
        const double fsum = g(piece, center - dx) + g(piece, center + dx);
        kronrod += kronrod_weights[j] * fsum;
        if (j % 2 == 1) gauss += gauss_weights[j / 2] * fsum;
    }
    kronrod *= half;
    gauss *= half;
    if (!std::isfinite(kronrod)) throw NumericalFailure("non-finite integrand value in quadrature");
    return {lo, hi, kronrod, std::abs(kronrod - gauss), depth, piece};
}

// Globally adaptive bisection over an initial partition. Each element of
// `initial` is {lo, hi, piece}. Throws QuadratureFailure when the global
// tolerance cannot be met within the depth limit.
template <class G>
QuadratureResult adaptive_quadrature(const G& g, const std::vector<Segment>& initial, const QuadratureConfig& cfg) {
    cfg.validate();
    constexpr std::size_t max_segments = 400000;
    std::priority_queue<Segment> active;
    std::vector<Segment> frozen;
    double total = 0.0;
    double total_err = 0.0;
    int evaluations = 0;
    for (const auto& s : initial) {
        if (!(s.hi > s.lo)) continue;
        Segment seg = gauss_kronrod_panel(g, s.piece, s.lo, s.hi, 0);
        evaluations += 15;
        total += seg.value;
        total_err += seg.error;
        active.push(seg);
    }
    auto tolerance = [&] { return std::max(cfg.abs_tol, cfg.rel_tol * std::abs(total)); };
    while (total_err > tolerance()) {
        if (active.empty() || active.size() + frozen.size() > max_segments) throw QuadratureFailure(total, total_err);
        Segment worst = active.top();
        active.pop();
        if (worst.depth >= cfg.max_refinements) {
            frozen.push_back(worst);
            continue;
        }
        const double mid = 0.5 * (worst.lo + worst.hi);
        Segment left = gauss_kronrod_panel(g, worst.piece, worst.lo, mid, worst.depth + 1);
        Segment right = gauss_kronrod_panel(g, worst.piece, mid, worst.hi, worst.depth + 1);
        evaluations += 30;
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        active.push(left);
        active.push(right);
    }
    // re-sum to shed accumulated cancellation in the running totals
    double sum = 0.0;
    double err = 0.0;
    for (const auto& s : frozen) {
        sum += s.value;
        err += s.error;
    }
    while (!active.empty()) {
        sum += active.top().value;
        err += active.top().error;
        active.pop();
    }
    return {sum, err, evaluations};
}

}  // namespace detail

/// ∫_a^b f(x) dx with breakpoints where f is not smooth.
template <class F>
QuadratureResult integrate(const F& f, double a, double b, const QuadratureConfig& cfg = {},
                           std::span<const double> breaks = {}) {
    if (!(b > a)) {
        if (a == b) return {};
        throw DomainError("integrate requires a <= b");
    }
    std::vector<double> edges{a};
    for (double x : breaks)
        if (x > a && x < b) edges.push_back(x);
    edges.push_back(b);
    std::sort(edges.begin(), edges.end());
    std::vector<detail::Segment> initial;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) initial.push_back({edges[i], edges[i + 1], 0, 0, 0, 0});
    auto g = [&](int, double x) { return static_cast<double>(f(x)); };
    return detail::adaptive_quadrature(g, initial, cfg);
}

/// ∫_0^upper f(r) r^s e^{-r²/gaussian_scale} dr, with upper possibly +∞.
///
/// gaussian_scale <= 0 drops the Gaussian factor (then upper must be finite).
/// The r^s weight at the origin is absorbed into the change of variables
/// r = b·u^{1/(s+1)} on the first panel, so f only needs to be bounded there.
/// The half-line beyond the last breakpoint is mapped onto [0, 1) by
/// r = a + L·t/(1 − t) with L = sqrt(gaussian_scale).
template <class F>
QuadratureResult power_weighted_integral(const F& f, double s, double upper, double gaussian_scale,
                                         const QuadratureConfig& cfg = {}, std::span<const double> breaks = {}) {
    if (!(s > -1.0)) throw DomainError("power weight r^s requires s > -1 for integrability at the origin");
    const bool gaussian = gaussian_scale > 0.0;
    const bool infinite = std::isinf(upper);
    if (infinite && !gaussian) throw DomainError("an infinite upper limit requires a Gaussian factor");
    if (!(upper > 0.0)) {
        if (upper == 0.0) return {};
        throw DomainError("upper limit must be nonnegative");
    }

    std::vector<double> edges;
    for (double x : breaks)
        if (x > 0.0 && x < upper && std::isfinite(x)) edges.push_back(x);
    if (gaussian) {
        const double width = std::sqrt(gaussian_scale);
        for (double m : {1.0, 3.0, 6.0})
            if (m * width < upper) edges.push_back(m * width);
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end(), [](double x, double y) { return std::abs(x - y) <= 1e-14 * y; }),
                edges.end());
    if (!infinite) edges.push_back(upper);
    if (edges.empty()) edges.push_back(std::sqrt(gaussian_scale));

    const double head = edges.front();
    const double width = gaussian ? std::sqrt(gaussian_scale) : 1.0;
    const double tail_start = edges.back();
    const double head_map = s < 0.0 ? 1.0 / (s + 1.0) : 1.0;
    const double head_power = s < 0.0 ? 0.0 : s;
    const double head_factor = head_map * std::pow(head, s + 1.0);

    // piece 0: head in u; 1: plain r; 2: tail in t
    auto weight = [&](double r) {
        if (!(r > 0.0)) return 0.0;
        double logw = s * std::log(r);
        if (gaussian) logw -= r * r / gaussian_scale;
        return std::exp(logw);
    };
    auto g = [&](int piece, double x) -> double {
        switch (piece) {
            case 0: {
                const double r = head * std::pow(x, head_map);
                const double jac = head_power == 0.0 ? head_factor : head_factor * std::pow(x, head_power);
                const double damp = gaussian ? std::exp(-r * r / gaussian_scale) : 1.0;
                if (jac == 0.0 || damp == 0.0) return 0.0;
                return static_cast<double>(f(r)) * jac * damp;
            }
            case 1: {
                const double w = weight(x);
                return w == 0.0 ? 0.0 : static_cast<double>(f(x)) * w;
            }
            default: {
                const double one_minus = 1.0 - x;
                const double r = tail_start + width * x / one_minus;
                const double w = weight(r);
                if (w == 0.0 || !std::isfinite(r)) return 0.0;
                return static_cast<double>(f(r)) * w * width / (one_minus * one_minus);
            }
        }
    };

    std::vector<detail::Segment> initial;
    initial.push_back({0.0, 1.0, 0, 0, 0, 0});
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) initial.push_back({edges[i], edges[i + 1], 0, 0, 0, 1});
    if (infinite) initial.push_back({0.0, 1.0, 0, 0, 0, 2});
    return detail::adaptive_quadrature(g, initial, cfg);
}

/// ∫_0^∞ f(r) r^s e^{-r²/gaussian_scale} dr. Returns the value; throws
/// QuadratureFailure on non-convergence.
template <class F>
double radial_integral(const F& f, double singular_exponent, double gaussian_scale, const QuadratureConfig& cfg = {},
                       std::span<const double> breaks = {}) {
    if (!(gaussian_scale > 0.0)) throw DomainError("radial_integral requires gaussian_scale > 0");
    return power_weighted_integral(f, singular_exponent, std::numeric_limits<double>::infinity(), gaussian_scale, cfg,
                                   breaks)
        .value;
}

// ---------------------------------------------------------------------------
// Sup search
// ---------------------------------------------------------------------------

enum class Endpoint { none, lower, upper };

struct SupSearchResult {
    double argmax = 0.0;
    double value = 0.0;
    bool converged = false;
    Endpoint endpoint = Endpoint::none;
    /// d ln g / d ln x across the last scan step at an endpoint maximum,
    /// measured pointing outward. Positive means still growing.
    double endpoint_log_slope = 0.0;
    /// The log-spaced scan: ln x_k and g(x_k).
    std::vector<double> grid_log_x;
    std::vector<double> grid_values;

    /// The objective keeps growing past the window edge at a power-law rate.
    bool diverges(double min_log_slope = 1e-3) const {
        return endpoint != Endpoint::none && endpoint_log_slope > min_log_slope;
    }
};

inline constexpr double default_log_lo = -13.815510557964274;  // ln 1e-6
inline constexpr double default_log_hi = 13.815510557964274;   // ln 1e6
inline constexpr int default_sup_grid = 241;

/// Maximizes g over x in [e^{log_lo}, e^{log_hi}]: log-spaced scan, then
/// golden-section refinement around the best interior bracket.
template <class G>
SupSearchResult sup_search(const G& g, double log_lo = default_log_lo, double log_hi = default_log_hi,
                           int grid_points = default_sup_grid) {
    if (!(log_lo < log_hi)) throw DomainError("sup_search requires log_lo < log_hi");
    if (grid_points < 16) throw DomainError("sup_search requires at least 16 grid points");
    const auto n = static_cast<std::size_t>(grid_points);
    const double step = (log_hi - log_lo) / static_cast<double>(n - 1);
    std::vector<double> xs(n), vs(n);
    for (std::size_t k = 0; k < n; ++k) {
        xs[k] = log_lo + step * static_cast<double>(k);
        if (k == n - 1) xs[k] = log_hi;
        vs[k] = static_cast<double>(g(std::exp(xs[k])));
        if (std::isnan(vs[k])) vs[k] = -std::numeric_limits<double>::infinity();
    }
    const double vmax = *std::max_element(vs.begin(), vs.end());
    const double tie = 1e-9 * std::abs(vmax);

    // prefer an interior maximizer when the endpoint is only tied with it
    std::size_t best = n;
    for (std::size_t k = 1; k + 1 < n; ++k)
        if (vs[k] >= vmax - tie && (best == n || vs[k] > vs[best])) best = k;

    SupSearchResult out;
    out.grid_log_x = xs;
    out.grid_values = vs;
    if (best == n) {
        const bool upper = vs[n - 1] >= vs[0];
        const std::size_t e = upper ? n - 1 : 0;
        const std::size_t inner = upper ? n - 2 : 1;
        out.argmax = std::exp(xs[e]);
        out.value = vs[e];
        out.converged = false;
        out.endpoint = upper ? Endpoint::upper : Endpoint::lower;
        if (vs[e] > 0.0 && vs[inner] > 0.0)
            out.endpoint_log_slope = (std::log(vs[e]) - std::log(vs[inner])) / step;
        else
            out.endpoint_log_slope = std::numeric_limits<double>::infinity();
        return out;
    }

    // golden-section search on [x_{best-1}, x_{best+1}]
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = xs[best - 1];
    double b = xs[best + 1];
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = static_cast<double>(g(std::exp(c)));
    double fd = static_cast<double>(g(std::exp(d)));
    while (b - a > 1e-10) {
        if (fc >= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = static_cast<double>(g(std::exp(c)));
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = static_cast<double>(g(std::exp(d)));
        }
    }
    const double xm = 0.5 * (a + b);
    const double fm = static_cast<double>(g(std::exp(xm)));
    if (fm >= vs[best]) {
        out.argmax = std::exp(xm);
        out.value = fm;
    } else {
        out.argmax = std::exp(xs[best]);
        out.value = vs[best];
    }
    out.converged = true;
    return out;
}

}  // namespace blowup
