#pragma once

// Heat-semigroup evaluation at the origin, the Gaussian-moment blowup
// criterion, the thresholds for multiples of the singular solution and for
// the critical Morrey norm, and the |x|^β-weighted extension.

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <tuple>
#include <utility>

#include "blowup/error.hpp"
#include "blowup/model.hpp"
#include "blowup/numerics.hpp"

namespace blowup {

enum class Verdict { blowup_predicted, inconclusive };

struct CriterionReport {
    double quantity = 0.0;            ///< sup_T T^{1/(p−1)}(e^{TΔ}u₀)(0); +∞ when divergent
    std::optional<double> argmax_T;   ///< empty means "divergent"
    double threshold = 0.0;           ///< (1/(p−1))^{1/(p−1)}
    Verdict verdict = Verdict::inconclusive;
    double margin = 0.0;              ///< quantity − threshold
    std::optional<double> blowup_time_bound;
};

struct ThresholdReport {
    double N_exact = 0.0;
    double N_asymptotic = 0.0;
    double M_bound = 0.0;
    double M_asymptotic = 0.0;
    double morrey_norm_uC = 0.0;
};

/// (1/(p−1))^{1/(p−1)}
inline double blowup_threshold(double p) {
    if (!(p > 1.0)) throw DomainError("exponent p must satisfy p > 1");
    return std::exp(-std::log(p - 1.0) / (p - 1.0));
}

/// (e^{TΔ}u₀)(0) = (4πT)^{−d/2} σ_d ∫₀^∞ e^{−r²/4T} u₀(r) r^{d−1} dr.
inline double heat_at_origin(const RadialProfile& u0, int d, double T, const QuadratureConfig& cfg = {}) {
    if (!(T > 0.0)) throw DomainError("heat_at_origin requires T > 0");
    if (const auto* c = std::get_if<profile::Constant>(&u0.kind())) return c->level;
    const double s = static_cast<double>(d) - 1.0 + u0.origin_exponent();
    const auto breaks = u0.feature_radii();
    const double integral =
        radial_integral([&](double r) { return u0.regular_part(r); }, s, 4.0 * T, cfg, breaks);
    const double log_prefactor = log_surface_area(d) - 0.5 * d * std::log(4.0 * std::numbers::pi * T);
    return std::exp(log_prefactor) * integral;
}

/// T^{1/(p−1)}(e^{TΔ}u_C)(0) = c·2^{−γ}Γ((d−γ)/2)/Γ(d/2), independent of T.
inline double scaled_semigroup_constant(int d, double p) {
    const auto m = ModelParams::make(d, p);
    const double c = m.require_c();
    const double g = m.gamma;
    return c * std::exp(-g * std::log(2.0) + log_gamma(0.5 * (d - g)) - log_gamma(0.5 * d));
}

/// T* = W0^{1−p}/(p−1): for T > T* the moment condition W0 > ((p−1)T)^{−1/(p−1)} holds.
inline double blowup_time_bound_from_W0(double W0, double p) {
    if (!(W0 > 0.0)) throw DomainError("W0 must be positive");
    if (!(p > 1.0)) throw DomainError("exponent p must satisfy p > 1");
    return std::exp((1.0 - p) * std::log(W0)) / (p - 1.0);
}

/// sup over T of T^{1/(p−1)}·heat_at_origin, compared with blowup_threshold.
inline CriterionReport check_blowup_criterion(const RadialProfile& u0, const ModelParams& m,
                                              const QuadratureConfig& cfg = {}) {
    const double inv = 1.0 / (m.p - 1.0);
    auto objective = [&](double T) { return std::exp(inv * std::log(T)) * heat_at_origin(u0, m.d, T, cfg); };
    const SupSearchResult sup = sup_search(objective);

    CriterionReport rep;
    rep.threshold = blowup_threshold(m.p);
    if (sup.diverges()) {
        rep.quantity = std::numeric_limits<double>::infinity();
        rep.argmax_T.reset();
    } else {
        rep.quantity = sup.value;
        rep.argmax_T = sup.argmax;
    }
    rep.margin = rep.quantity - rep.threshold;
    rep.verdict = rep.quantity > rep.threshold ? Verdict::blowup_predicted : Verdict::inconclusive;
    if (rep.verdict != Verdict::blowup_predicted) return rep;

    // least T on the scan grid above threshold, refined by bisection
    const auto& xs = sup.grid_log_x;
    const auto& vs = sup.grid_values;
    std::size_t k = 0;
    while (k < vs.size() && !(vs[k] > rep.threshold)) ++k;
    double lo;
    double hi;
    if (k == 0) {
        rep.blowup_time_bound = std::exp(xs.front());
        return rep;
    }
    if (k < vs.size()) {
        lo = xs[k - 1];
        hi = xs[k];
    } else if (rep.argmax_T) {
        hi = std::log(*rep.argmax_T);
        lo = hi;
        for (std::size_t j = 0; j < xs.size(); ++j)
            if (xs[j] < hi) lo = xs[j];
    } else {
        return rep;  // predicted by divergence beyond the scan window
    }
    for (int it = 0; it < 200 && hi - lo > 1e-13 * std::max(1.0, std::abs(hi)); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (objective(std::exp(mid)) > rep.threshold)
            hi = mid;
        else
            lo = mid;
    }
    rep.blowup_time_bound = std::exp(hi);
    return rep;
}

/// Upper bound for the multiple 𝒩 of u_C that forces blowup, and its
/// large-d form (1 − 2p/(d(p−1)))^{−1/(p−1)}.
inline std::pair<double, double> threshold_N(int d, double p) {
    const auto m = ModelParams::make(d, p);
    m.require_c();
    const double inv = 1.0 / (p - 1.0);
    const double dd = static_cast<double>(d);
    const double exact = std::exp(inv * std::log(2.0) - inv * std::log(dd - 2.0 * p * inv) + log_gamma(0.5 * dd) -
                                  log_gamma(0.5 * dd - inv));
    const double asymptotic = std::exp(-inv * std::log(1.0 - 2.0 * p / (dd * (p - 1.0))));
    return {exact, asymptotic};
}

/// Upper bound for the critical Morrey norm ℳ forcing blowup of radial data,
/// and its Stirling form 2^γ(1/(p−1))^{1/(p−1)}σ_d√(π/2)((d−γ)/2)^{(γ−1)/2}.
inline std::pair<double, double> threshold_M(int d, double p) {
    const double g = gamma_exponent(p);
    const double dd = static_cast<double>(d);
    const double excess = dd - g;
    if (!(excess > 0.0)) throw DomainError("Morrey threshold requires p > (d+2)/d");
    const double log_theta = -std::log(p - 1.0) / (p - 1.0);
    const double bound = std::exp(log_theta + 0.5 * dd * std::log(4.0 * std::numbers::pi) + 0.5 * excess -
                                  0.5 * excess * std::log(2.0 * excess));
    const double asymptotic = std::exp(log_theta + g * std::log(2.0) + log_surface_area(d) +
                                       0.5 * std::log(0.5 * std::numbers::pi) +
                                       0.5 * (g - 1.0) * std::log(0.5 * excess));
    return {bound, asymptotic};
}

/// ‖u_C‖ in the critical Morrey norm, c·σ_d/(d − γ).
inline double morrey_norm_singular(int d, double p) {
    const auto m = ModelParams::make(d, p);
    return m.require_c() * surface_area(d) / (static_cast<double>(d) - m.gamma);
}

inline ThresholdReport threshold_report(int d, double p) {
    ThresholdReport rep;
    std::tie(rep.N_exact, rep.N_asymptotic) = threshold_N(d, p);
    std::tie(rep.M_bound, rep.M_asymptotic) = threshold_M(d, p);
    rep.morrey_norm_uC = morrey_norm_singular(d, p);
    return rep;
}

/// M(R) = σ_d ∫₀^R u₀(ρ) ρ^{d−1} dρ.
inline double radial_mass(const RadialProfile& u0, int d, double R, const QuadratureConfig& cfg = {}) {
    if (!(R > 0.0)) throw DomainError("radial_mass requires R > 0");
    const double s = static_cast<double>(d) - 1.0 + u0.origin_exponent();
    const auto breaks = u0.feature_radii();
    const double integral =
        power_weighted_integral([&](double r) { return u0.regular_part(r); }, s, R, 0.0, cfg, breaks).value;
    return surface_area(d) * integral;
}

/// Sup search for the radial critical Morrey norm sup_R R^{γ−d} M(R).
inline SupSearchResult morrey_norm_search(const RadialProfile& u0, const ModelParams& m,
                                          const QuadratureConfig& cfg = {}) {
    const double power = m.gamma - static_cast<double>(m.d);
    return sup_search([&](double R) { return std::exp(power * std::log(R)) * radial_mass(u0, m.d, R, cfg); });
}

/// Critical Morrey norm (q = 1) of a nonnegative radial profile; +∞ when the
/// sup keeps growing at the window edge.
inline double morrey_norm(const RadialProfile& u0, const ModelParams& m, const QuadratureConfig& cfg = {}) {
    const auto sup = morrey_norm_search(u0, m, cfg);
    return sup.diverges() ? std::numeric_limits<double>::infinity() : sup.value;
}

/// T^{d/2}(4π)^{d/2}·heat_at_origin(T); tends to ‖u₀‖₁ as T → ∞.
inline double scaled_heat_mass(const RadialProfile& u0, int d, double T, const QuadratureConfig& cfg = {}) {
    return std::exp(0.5 * d * std::log(4.0 * std::numbers::pi * T)) * heat_at_origin(u0, d, T, cfg);
}

/// Right-hand side of the blowup condition for u_t = Δu + |x|^β u^p:
/// (4π)^{−d/2}(∫₀^T (p−1)(T−t)^{d(p−1)/2}(∫Q^{−1/(p−1)}e^{−|x|²/4(T−t)}dx)^{1−p} dt)^{−1/(p−1)}.
/// The inner integral is taken in closed Gamma form, the outer adaptively.
inline double weighted_criterion_bound(int d, double p, double beta, double T, const QuadratureConfig& cfg = {}) {
    if (d < 1) throw DomainError("dimension d must be >= 1");
    if (!(p > 1.0)) throw DomainError("exponent p must satisfy p > 1");
    if (!(T > 0.0)) throw DomainError("horizon T must be positive");
    const double dd = static_cast<double>(d);
    if (!(beta < dd * (p - 1.0))) throw DomainError("weighted criterion requires beta < d(p-1)");
    if (!(beta > -2.0)) throw DomainError("weighted criterion requires beta > -2 for a finite time integral");
    const double kappa = beta / (p - 1.0);
    const double half = 0.5 * (dd - kappa);
    const double log_inner_const = log_surface_area(d) - std::log(2.0) + log_gamma(half);
    // integrand in s = T − t, with the s^{β/2} behaviour moved into the weight
    auto regular = [&](double s) {
        const double log_inner = log_inner_const + half * std::log(4.0 * s);
        const double log_integrand = std::log(p - 1.0) + 0.5 * dd * (p - 1.0) * std::log(s) + (1.0 - p) * log_inner;
        return std::exp(log_integrand - 0.5 * beta * std::log(s));
    };
    const double outer = power_weighted_integral(regular, 0.5 * beta, T, 0.0, cfg).value;
    return std::exp(-0.5 * dd * std::log(4.0 * std::numbers::pi) - std::log(outer) / (p - 1.0));
}

}  // namespace blowup
