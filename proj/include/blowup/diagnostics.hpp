#pragma once

// Gaussian-moment tracking and checks of the moment inequalities along
// simulated solutions.

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "blowup/error.hpp"
#include "blowup/model.hpp"
#include "blowup/numerics.hpp"
#include "blowup/state.hpp"

namespace blowup {

struct MomentEntry {
    double t = 0.0;
    double W = std::numeric_limits<double>::quiet_NaN();  ///< NaN once t >= T_ref
    double mass_L1 = 0.0;
    double sup_norm = 0.0;
};

struct MomentSeries {
    std::vector<MomentEntry> entries;
    double T_ref = 1.0;
};

/// G(x, t) = (4π(T−t))^{−d/2} exp(−|x|²/4(T−t)), the backward heat kernel
/// concentrating to δ₀ at t = T_ref.
inline double backward_kernel(double x_radius, double t, double T_ref, int d) {
    if (!(t < T_ref)) throw DomainError("backward kernel requires t < T_ref");
    if (d < 1) throw DomainError("dimension d must be >= 1");
    const double tau = T_ref - t;
    return std::exp(-0.5 * d * std::log(4.0 * std::numbers::pi * tau) - x_radius * x_radius / (4.0 * tau));
}

namespace detail {

// σ_d ∫ w(r) u(r) r^{d−1} dr over the grid: constant extension on [0, r_0],
// trapezoid between nodes.
template <class Weight>
double grid_radial_integral(const SimState& s, int d, const Weight& w) {
    const auto& r = s.radii();
    const auto& u = s.values;
    const double dm1 = static_cast<double>(d) - 1.0;
    auto f = [&](std::size_t i) { return w(r[i]) * u[i] * std::pow(r[i], dm1); };
    double sum = 0.0;
    if (r[0] > 0.0) sum += w(0.5 * r[0]) * u[0] * std::pow(r[0], d) / d;
    double prev = f(0);
    for (std::size_t i = 1; i < r.size(); ++i) {
        const double cur = f(i);
        sum += 0.5 * (prev + cur) * (r[i] - r[i - 1]);
        prev = cur;
    }
    return surface_area(d) * sum;
}

}  // namespace detail

/// W(t) = ∫ G(x, t) u(x, t) dx by grid quadrature, plus the far-field tail.
inline double moment_W(const SimState& s, double T_ref, int d) {
    if (!(s.t < T_ref)) throw DomainError("moment_W requires t < T_ref");
    const double tau = T_ref - s.t;
    const double log_norm = -0.5 * d * std::log(4.0 * std::numbers::pi * tau);
    auto kernel = [&](double r) { return std::exp(log_norm - r * r / (4.0 * tau)); };
    double W = detail::grid_radial_integral(s, d, kernel);

    const double rn = s.radii().back();
    const double un = s.values.back();
    if (un != 0.0 && std::isfinite(s.tail_exponent)) {
        const double a = s.tail_exponent;
        const double breaks[] = {rn};
        const double tail = radial_integral([&](double r) { return r > rn ? std::pow(r / rn, -a) : 0.0; },
                                            static_cast<double>(d) - 1.0, 4.0 * tau, {}, breaks);
        W += surface_area(d) * std::exp(log_norm) * un * tail;
    }
    return W;
}

/// ‖u(t)‖₁ by grid quadrature plus the far-field tail; +∞ when the declared
/// tail is not integrable.
inline double mass_L1(const SimState& s, int d) {
    double mass = detail::grid_radial_integral(s, d, [](double) { return 1.0; });
    const double rn = s.radii().back();
    const double un = s.values.back();
    if (un != 0.0) {
        const double a = s.tail_exponent;
        if (!(a > d)) return std::numeric_limits<double>::infinity();
        if (std::isfinite(a)) mass += surface_area(d) * un * std::pow(rn, d) / (a - d);
    }
    return mass;
}

struct MomentViolation {
    std::size_t index = 0;  ///< slope between entries index and index+1
    double slope = 0.0;
    double required = 0.0;  ///< min(W_k, W_{k+1})^p
};

/// Forward-difference check of dW/dt ≥ W^p along a series. Entries without a
/// moment value (t >= T_ref) are skipped.
inline std::vector<MomentViolation> check_moment_ode(const MomentSeries& series, double p, double tol_rel = 1e-2) {
    std::vector<MomentViolation> out;
    const auto& e = series.entries;
    for (std::size_t k = 0; k + 1 < e.size(); ++k) {
        if (std::isnan(e[k].W) || std::isnan(e[k + 1].W)) continue;
        const double dt = e[k + 1].t - e[k].t;
        if (!(dt > 0.0)) continue;
        const double slope = (e[k + 1].W - e[k].W) / dt;
        const double required = std::pow(std::min(e[k].W, e[k + 1].W), p);
        if (slope < (1.0 - tol_rel) * required) out.push_back({k, slope, required});
    }
    return out;
}

/// Worst relative deficit max_k (bound_k − W_k)/bound_k of the integrated
/// lower bound W(t) ≥ (W(0)^{1−p} − (p−1)t)^{−1/(p−1)}, t measured from the
/// first entry. Nonpositive means the bound holds at every entry.
inline double check_lower_bound(const MomentSeries& series, double p) {
    const auto& e = series.entries;
    if (e.empty()) return 0.0;
    const double W0 = e.front().W;
    if (!(W0 > 0.0)) throw DomainError("lower-bound check requires W(0) > 0");
    const double base = std::pow(W0, 1.0 - p);
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& entry : e) {
        if (std::isnan(entry.W)) continue;
        const double elapsed = entry.t - e.front().t;
        double bound;
        if (elapsed == 0.0) {
            bound = W0;
        } else {
            const double denom = base - (p - 1.0) * elapsed;
            if (!(denom > 0.0)) continue;
            bound = std::pow(denom, -1.0 / (p - 1.0));
        }
        worst = std::max(worst, (bound - entry.W) / bound);
    }
    return worst;
}

/// Moment/mass/sup entry for a snapshot.
inline MomentEntry moment_entry(const SimState& s, double T_ref, int d) {
    MomentEntry entry;
    entry.t = s.t;
    if (s.t < T_ref) entry.W = moment_W(s, T_ref, d);
    entry.mass_L1 = mass_L1(s, d);
    entry.sup_norm = s.sup();
    return entry;
}

}  // namespace blowup
