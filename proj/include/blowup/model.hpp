#pragma once

// Model parameters, regime classification, the singular stationary solution
// and radial initial profiles.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "blowup/error.hpp"
#include "blowup/numerics.hpp"

namespace blowup {

/// p given exactly as num/den, used for exact regime tests.
struct Ratio {
    long long num = 0;
    long long den = 1;

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

/// Tolerance for regime boundaries when p is only known as a double.
inline constexpr double regime_tolerance = 1e-12;

/// γ = 2/(p−1), the exponent with γ + 2 = pγ.
inline double gamma_exponent(double p) {
    if (!(p > 1.0) || !std::isfinite(p)) throw DomainError("exponent p must satisfy p > 1");
    return 2.0 / (p - 1.0);
}

namespace detail {

inline bool singular_range(int d, double p, const std::optional<Ratio>& ratio) {
    if (d < 3) return false;
    if (ratio) {
        // d − 2 − γ > 0  ⟺  (d − 2)(num − den) > 2 den
        return static_cast<long long>(d - 2) * (ratio->num - ratio->den) > 2 * ratio->den;
    }
    return static_cast<double>(d) - 2.0 - gamma_exponent(p) > regime_tolerance;
}

inline void validate_ratio(const Ratio& r) {
    if (r.den <= 0 || r.num <= r.den) throw DomainError("exponent ratio must have den > 0 and num/den > 1");
}

}  // namespace detail

/// Singular stationary solution constant c with c^{p−1} = γ(d − 2 − γ).
inline double singular_constant(int d, double p) {
    const double gamma = gamma_exponent(p);
    if (!detail::singular_range(d, p, std::nullopt)) throw DomainError("singular solution requires p > d/(d-2)");
    const double base = gamma * (static_cast<double>(d) - 2.0 - gamma);
    return std::exp(std::log(base) / (p - 1.0));
}

/// Parameter record shared by every computation: dimension d, exponent p
/// and the derived γ and c (when the singular solution exists).
struct ModelParams {
    int d = 0;
    double p = 0.0;
    double gamma = 0.0;
    std::optional<double> c_sing;
    std::optional<Ratio> p_ratio;

    static ModelParams make(int d, double p) {
        if (d < 1) throw DomainError("dimension d must be >= 1");
        ModelParams m;
        m.d = d;
        m.p = p;
        m.gamma = gamma_exponent(p);
        if (detail::singular_range(d, p, std::nullopt)) m.c_sing = singular_constant(d, p);
        return m;
    }

    static ModelParams make(int d, Ratio p) {
        detail::validate_ratio(p);
        ModelParams m = make(d, p.value());
        m.p_ratio = p;
        m.c_sing.reset();
        if (detail::singular_range(d, m.p, p)) m.c_sing = singular_constant(d, m.p);
        return m;
    }

    /// c, or DomainError when no singular stationary solution exists.
    double require_c() const {
        if (!c_sing) throw DomainError("singular solution requires p > d/(d-2)");
        return *c_sing;
    }
};

struct RegimeFlags {
    bool fujita_subcritical = false;
    bool fujita_critical = false;
    bool singular_solution_exists = false;
};

/// Sign of d(p − 1) − 2 decides subcritical / critical; exact for ratios.
inline RegimeFlags classify_regime(const ModelParams& m) {
    RegimeFlags flags;
    if (m.p_ratio) {
        const long long lhs = static_cast<long long>(m.d) * (m.p_ratio->num - m.p_ratio->den);
        const long long rhs = 2 * m.p_ratio->den;
        flags.fujita_subcritical = lhs < rhs;
        flags.fujita_critical = lhs == rhs;
    } else {
        const double excess = static_cast<double>(m.d) * (m.p - 1.0) - 2.0;
        flags.fujita_critical = std::abs(excess) <= regime_tolerance;
        flags.fujita_subcritical = !flags.fujita_critical && excess < 0.0;
    }
    flags.singular_solution_exists = detail::singular_range(m.d, m.p, m.p_ratio);
    return flags;
}

inline RegimeFlags classify_regime(int d, double p) { return classify_regime(ModelParams::make(d, p)); }

inline double log_surface_area(int d) {
    if (d < 1) throw DomainError("dimension d must be >= 1");
    const double half = 0.5 * static_cast<double>(d);
    return std::log(2.0) + half * std::log(std::numbers::pi) - log_gamma(half);
}

/// Area σ_d = 2π^{d/2}/Γ(d/2) of the unit sphere in R^d.
inline double surface_area(int d) { return std::exp(log_surface_area(d)); }

// ---------------------------------------------------------------------------
// Radial profiles
// ---------------------------------------------------------------------------

namespace profile {

/// N·c·r^{−γ}
struct Singular {
    double scale = 1.0;
    double coefficient = 0.0;  ///< N·c
    double gamma = 0.0;
};

/// min(N·c·r^{−γ}, H)
struct TruncatedSingular {
    double scale = 1.0;
    double cap = 1.0;
    double coefficient = 0.0;
    double gamma = 0.0;

    double cap_radius() const { return std::pow(coefficient / cap, 1.0 / gamma); }
};

/// A·exp(−r²/σ²)
struct Gaussian {
    double amplitude = 1.0;
    double width = 1.0;
};

/// A on r < R, 0 beyond
struct Indicator {
    double amplitude = 1.0;
    double radius = 1.0;
};

struct Constant {
    double level = 0.0;
};

/// A·(1 + r²)^{−a/2}: bounded at the origin, decays like A·r^{−a}
struct PowerTail {
    double amplitude = 1.0;
    double exponent = 1.0;
};

/// Grid samples; linear in log r between nodes, constant below the first
/// node, u_last·(r/r_last)^{−a_tail} beyond the last.
struct Sampled {
    std::vector<double> r;
    std::vector<double> u;
    double tail_exponent = 0.0;
};

}  // namespace profile

class RadialProfile {
public:
    using Kind = std::variant<profile::Singular, profile::TruncatedSingular, profile::Gaussian, profile::Indicator,
                              profile::Constant, profile::PowerTail, profile::Sampled>;

    static RadialProfile singular(const ModelParams& m, double scale) {
        require_nonnegative(scale, "scale");
        return RadialProfile(profile::Singular{scale, scale * m.require_c(), m.gamma});
    }
    static RadialProfile truncated_singular(const ModelParams& m, double scale, double cap) {
        require_nonnegative(scale, "scale");
        if (!(cap > 0.0)) throw DomainError("truncated_singular requires cap > 0");
        return RadialProfile(profile::TruncatedSingular{scale, cap, scale * m.require_c(), m.gamma});
    }
    static RadialProfile gaussian(double amplitude, double width) {
        require_nonnegative(amplitude, "amplitude");
        if (!(width > 0.0)) throw DomainError("gaussian requires width > 0");
        return RadialProfile(profile::Gaussian{amplitude, width});
    }
    static RadialProfile indicator(double amplitude, double radius) {
        require_nonnegative(amplitude, "amplitude");
        if (!(radius > 0.0)) throw DomainError("indicator requires radius > 0");
        return RadialProfile(profile::Indicator{amplitude, radius});
    }
    static RadialProfile constant(double level) {
        require_nonnegative(level, "level");
        return RadialProfile(profile::Constant{level});
    }
    static RadialProfile power_tail(double amplitude, double exponent) {
        require_nonnegative(amplitude, "amplitude");
        if (!(exponent >= 0.0)) throw DomainError("power_tail requires exponent >= 0");
        return RadialProfile(profile::PowerTail{amplitude, exponent});
    }
    static RadialProfile sampled(std::vector<double> r, std::vector<double> u, double tail_exponent) {
        if (r.size() != u.size() || r.size() < 2) throw DomainError("sampled profile needs >= 2 matching (r, u) pairs");
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (!(r[i] > 0.0) || !std::isfinite(r[i])) throw DomainError("sampled radii must be positive and finite");
            if (i > 0 && !(r[i] > r[i - 1])) throw DomainError("sampled radii must be strictly increasing");
            if (!(u[i] >= 0.0) || !std::isfinite(u[i])) throw DomainError("sampled values must be finite and >= 0");
        }
        if (!(tail_exponent >= 0.0)) throw DomainError("tail_exponent must be >= 0");
        return RadialProfile(profile::Sampled{std::move(r), std::move(u), tail_exponent});
    }

    const Kind& kind() const { return kind_; }

    std::string_view kind_name() const {
        static constexpr std::string_view names[] = {"singular", "truncated_singular", "gaussian", "indicator",
                                                     "constant", "power_tail",         "sampled"};
        return names[kind_.index()];
    }

    template <class T>
    bool is() const {
        return std::holds_alternative<T>(kind_);
    }

    /// Unbounded at the origin (only the uncapped singular kind).
    bool unbounded() const { return is<profile::Singular>(); }

    /// Exponent e with u(r) ~ r^e as r → 0⁺.
    double origin_exponent() const {
        if (const auto* s = std::get_if<profile::Singular>(&kind_)) return -s->gamma;
        return 0.0;
    }

    /// Limit of u(r) as r → ∞.
    double far_field_value() const {
        if (const auto* c = std::get_if<profile::Constant>(&kind_)) return c->level;
        return 0.0;
    }

    /// Decay exponent a with u(r) ~ r^{−a} at infinity; +∞ for compact or
    /// Gaussian decay.
    double tail_exponent() const {
        return std::visit(
            [](const auto& k) -> double {
                using T = std::decay_t<decltype(k)>;
                if constexpr (std::is_same_v<T, profile::Singular> || std::is_same_v<T, profile::TruncatedSingular>)
                    return k.gamma;
                else if constexpr (std::is_same_v<T, profile::PowerTail>)
                    return k.exponent;
                else if constexpr (std::is_same_v<T, profile::Sampled>)
                    return k.tail_exponent;
                else if constexpr (std::is_same_v<T, profile::Constant>)
                    return 0.0;
                else
                    return std::numeric_limits<double>::infinity();
            },
            kind_);
    }

    /// Radii where the profile is not smooth.
    std::vector<double> breakpoints() const {
        if (const auto* t = std::get_if<profile::TruncatedSingular>(&kind_)) {
            if (t->coefficient > 0.0) return {t->cap_radius()};
            return {};
        }
        if (const auto* ind = std::get_if<profile::Indicator>(&kind_)) return {ind->radius};
        if (const auto* s = std::get_if<profile::Sampled>(&kind_)) return s->r;
        return {};
    }

    /// Breakpoints plus the radii where the profile's own features live
    /// (Gaussian width, power-tail knee); seeds quadrature panels so that
    /// features far below the integration scale are not stepped over.
    std::vector<double> feature_radii() const {
        auto out = breakpoints();
        if (const auto* g = std::get_if<profile::Gaussian>(&kind_)) {
            for (double m : {0.5, 1.0, 2.0, 4.0, 6.0}) out.push_back(m * g->width);
        } else if (is<profile::PowerTail>()) {
            for (double m : {0.1, 1.0, 10.0}) out.push_back(m);
        }
        return out;
    }

    /// Pointwise value; r = 0 is allowed for bounded kinds only.
    double operator()(double r) const {
        if (!(r >= 0.0)) throw DomainError("profile evaluated at negative radius");
        return std::visit([r](const auto& k) { return evaluate(k, r); }, kind_);
    }

    /// u(r)·r^{−origin_exponent()}, bounded near the origin for every kind.
    double regular_part(double r) const {
        if (const auto* s = std::get_if<profile::Singular>(&kind_)) return s->coefficient;
        return (*this)(r);
    }

    /// λ^γ·u(λr), the scaling that preserves the equation.
    RadialProfile rescaled(double lambda, double gamma) const {
        if (!(lambda > 0.0)) throw DomainError("rescaling factor must be positive");
        const double amp = std::pow(lambda, gamma);
        return std::visit(
            [&](const auto& k) -> RadialProfile {
                using T = std::decay_t<decltype(k)>;
                if constexpr (std::is_same_v<T, profile::Singular>) {
                    auto out = k;
                    out.coefficient = k.coefficient * amp * std::pow(lambda, -k.gamma);
                    out.scale = k.scale * amp * std::pow(lambda, -k.gamma);
                    return RadialProfile(out);
                } else if constexpr (std::is_same_v<T, profile::TruncatedSingular>) {
                    auto out = k;
                    out.coefficient = k.coefficient * amp * std::pow(lambda, -k.gamma);
                    out.scale = k.scale * amp * std::pow(lambda, -k.gamma);
                    out.cap = k.cap * amp;
                    return RadialProfile(out);
                } else if constexpr (std::is_same_v<T, profile::Gaussian>) {
                    return RadialProfile(profile::Gaussian{k.amplitude * amp, k.width / lambda});
                } else if constexpr (std::is_same_v<T, profile::Indicator>) {
                    return RadialProfile(profile::Indicator{k.amplitude * amp, k.radius / lambda});
                } else if constexpr (std::is_same_v<T, profile::Constant>) {
                    return RadialProfile(profile::Constant{k.level * amp});
                } else if constexpr (std::is_same_v<T, profile::Sampled>) {
                    auto out = k;
                    for (auto& x : out.r) x /= lambda;
                    for (auto& v : out.u) v *= amp;
                    return RadialProfile(std::move(out));
                } else {
                    throw DomainError("power_tail profiles are not closed under rescaling");
                }
            },
            kind_);
    }

private:
    explicit RadialProfile(Kind k) : kind_(std::move(k)) {}

    static void require_nonnegative(double v, const char* what) {
        if (!(v >= 0.0) || !std::isfinite(v)) throw DomainError(std::string("profile ") + what + " must be finite and >= 0");
    }

    static double evaluate(const profile::Singular& k, double r) {
        if (r == 0.0) {
            if (k.coefficient == 0.0) return 0.0;
            throw SingularityError("singular profile is unbounded at r = 0");
        }
        return k.coefficient * std::pow(r, -k.gamma);
    }
    static double evaluate(const profile::TruncatedSingular& k, double r) {
        if (r == 0.0) return k.coefficient > 0.0 ? k.cap : 0.0;
        return std::min(k.coefficient * std::pow(r, -k.gamma), k.cap);
    }
    static double evaluate(const profile::Gaussian& k, double r) {
        const double x = r / k.width;
        return k.amplitude * std::exp(-x * x);
    }
    static double evaluate(const profile::Indicator& k, double r) { return r < k.radius ? k.amplitude : 0.0; }
    static double evaluate(const profile::Constant& k, double) { return k.level; }
    static double evaluate(const profile::PowerTail& k, double r) {
        return k.amplitude * std::pow(1.0 + r * r, -0.5 * k.exponent);
    }
    static double evaluate(const profile::Sampled& k, double r) {
        if (r <= k.r.front()) return k.u.front();
        if (r >= k.r.back()) {
            if (k.tail_exponent == 0.0) return k.u.back();
            return k.u.back() * std::pow(r / k.r.back(), -k.tail_exponent);
        }
        const auto it = std::upper_bound(k.r.begin(), k.r.end(), r);
        const auto i = static_cast<std::size_t>(it - k.r.begin());
        const double r0 = k.r[i - 1];
        const double r1 = k.r[i];
        const double w = std::log(r / r0) / std::log(r1 / r0);
        return k.u[i - 1] + w * (k.u[i] - k.u[i - 1]);
    }

    Kind kind_;
};

/// Free-function form of RadialProfile::operator().
inline double eval_profile(const RadialProfile& profile, double r) { return profile(r); }

}  // namespace blowup
