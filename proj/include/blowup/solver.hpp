#pragma once

// Radial method-of-lines solver for u_t = u_rr + (d−1)/r·u_r + |u|^{p−1}u.
//
// Space: node-centred finite volumes for r^{1−d}(r^{d−1}u_r)_r, which is the
// second-order central discretization with positive neighbour weights. The
// inner face carries zero flux (u_r = 0 at r_min, or symmetry at r = 0); the
// outer node is pinned to the profile's far-field value unless the outer
// boundary is switched to zero flux.
//
// Time: classical RK4 with dt = min(cfl·h², positivity limit, safety/(p·sup^{p−1})).

#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "blowup/criteria.hpp"
#include "blowup/diagnostics.hpp"
#include "blowup/error.hpp"
#include "blowup/model.hpp"
#include "blowup/state.hpp"

namespace blowup {

struct StepConfig {
    double cfl_coeff = 0.2;
    double safety = 0.1;
    /// dt·(largest diagonal of the diffusion operator) never exceeds this;
    /// keeps the RK4 update of the linear part a nonnegative matrix.
    double positivity_fraction = 0.8;
};

struct SimOptions {
    StepConfig step;
    double blowup_sup_threshold = 1e8;
    double dt_floor = 1e-14;
    /// Spacing of recorded MomentSeries entries; 0 picks min(t_max, T_ref)/100.
    double record_interval = 0.0;
    /// Horizon of the backward kernel; defaults to 1.1× the criterion's
    /// blowup-time bound, else t_max.
    std::optional<double> T_ref;
    std::vector<double> snapshot_times;
    long long max_steps = 50'000'000;
    QuadratureConfig quadrature;
};

struct BlewUp {
    double t_blow = 0.0;
    double sup_at_detection = 0.0;
};
struct Survived {
    double horizon = 0.0;
    double final_sup = 0.0;
};
struct StepFailure {
    double t = 0.0;
    std::string reason;
};
using Outcome = std::variant<BlewUp, Survived, StepFailure>;

struct BarrierPoint {
    double t = 0.0;
    double z_max = 0.0;
};

struct SimResult {
    Outcome outcome;
    MomentSeries series;
    std::optional<std::vector<BarrierPoint>> barrier_series;
    std::vector<SimState> snapshots;
    long long steps = 0;

    bool blew_up() const { return std::holds_alternative<BlewUp>(outcome); }
    bool survived() const { return std::holds_alternative<Survived>(outcome); }
    double t_blow() const { return std::get<BlewUp>(outcome).t_blow; }
};

/// max over the grid of z = r^γ·u.
inline double barrier_max(const SimState& s, const ModelParams& m) {
    const auto& r = s.radii();
    double z = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) z = std::max(z, std::pow(r[i], m.gamma) * s.values[i]);
    return z;
}

/// Grid samples of a bounded profile; the last node carries the far-field value.
inline SimState init_state(const RadialProfile& u0, const GridConfig& grid) {
    if (u0.unbounded()) throw DomainError("solver needs a bounded profile; use truncated_singular instead of singular");
    auto g = std::make_shared<const RadialGrid>(grid);
    SimState s;
    s.grid = g;
    s.values.resize(g->size());
    const auto& r = g->radii();
    for (std::size_t i = 0; i < r.size(); ++i) s.values[i] = u0(r[i]);
    if (!grid.outer_neumann) s.values.back() = u0.far_field_value();
    s.tail_exponent = u0.tail_exponent();
    return s;
}

class RadialSolver {
public:
    RadialSolver(const ModelParams& m, std::shared_ptr<const RadialGrid> grid, StepConfig cfg = {})
        : m_(m), grid_(std::move(grid)), cfg_(cfg) {
        const auto& r = grid_->radii();
        const std::size_t n = r.size() - 1;
        const double d = static_cast<double>(m_.d);
        left_.assign(n + 1, 0.0);
        right_.assign(n + 1, 0.0);
        auto face = [&](std::size_t i) { return 0.5 * (r[i] + r[i + 1]); };  // face between i and i+1
        auto volume = [&](double a, double b) { return (std::pow(b, d) - std::pow(a, d)) / d; };
        const std::size_t last = grid_->config().outer_neumann ? n : n - 1;
        for (std::size_t i = 0; i <= last; ++i) {
            const double lo = i == 0 ? r[0] : face(i - 1);
            const double hi = i == n ? r[n] : face(i);
            const double V = volume(lo, hi);
            if (i > 0) left_[i] = std::pow(lo, d - 1.0) / ((r[i] - r[i - 1]) * V);
            if (i < n) right_[i] = std::pow(hi, d - 1.0) / ((r[i + 1] - r[i]) * V);
        }
        inner_pinned_ = grid_->config().inner_dirichlet;
        if (inner_pinned_) right_[0] = 0.0;
        double max_diag = 0.0;
        for (std::size_t i = 0; i <= n; ++i) max_diag = std::max(max_diag, left_[i] + right_[i]);
        const double h = grid_->min_spacing();
        dt_diffusion_ = std::min(cfg_.cfl_coeff * h * h, cfg_.positivity_fraction / max_diag);
        active_end_ = last + 1;
        const double rounded = std::round(m_.p);
        integer_power_ = std::abs(m_.p - rounded) < 1e-15 && rounded <= 16.0 ? static_cast<int>(rounded) : 0;
    }

    const ModelParams& params() const { return m_; }
    const std::shared_ptr<const RadialGrid>& grid() const { return grid_; }
    double diffusion_dt() const { return dt_diffusion_; }

    double reaction(double u) const {
        const double a = std::abs(u);
        double ap;
        if (integer_power_ > 0) {
            ap = a;
            for (int k = 1; k < integer_power_; ++k) ap *= a;
        } else {
            ap = a == 0.0 ? 0.0 : std::exp(m_.p * std::log(a));
        }
        return u < 0.0 ? -ap : ap;
    }

    /// Semi-discrete right-hand side L_h u + |u|^{p−1}u; pinned (Dirichlet)
    /// nodes get 0.
    void rhs(const std::vector<double>& u, std::vector<double>& out) const {
        out.resize(u.size());
        switch (integer_power_) {
            case 2: rhs_kernel(u.data(), out.data(), [](double v) { return v * std::abs(v); }); break;
            case 3: rhs_kernel(u.data(), out.data(), [](double v) { return v * v * v; }); break;
            default: rhs_kernel(u.data(), out.data(), [this](double v) { return reaction(v); }); break;
        }
    }

    /// Step size the controller would take from a state with this sup norm.
    double controlled_dt(double sup) const {
        double dt = dt_diffusion_;
        if (sup > 0.0) dt = std::min(dt, cfg_.safety / (m_.p * std::exp((m_.p - 1.0) * std::log(sup))));
        return dt;
    }
    double controlled_dt(const SimState& s) const { return controlled_dt(s.sup()); }

    /// One RK4 step of size dt applied in place; returns the new sup norm.
    /// Throws NumericalFailure on non-finite values or negative undershoots
    /// beyond round-off.
    double advance(std::vector<double>& u, double dt) const {
        const std::size_t size = u.size();
        rhs(u, k1_);
        tmp_.resize(size);
        for (std::size_t i = 0; i < size; ++i) tmp_[i] = u[i] + 0.5 * dt * k1_[i];
        rhs(tmp_, k2_);
        for (std::size_t i = 0; i < size; ++i) tmp_[i] = u[i] + 0.5 * dt * k2_[i];
        rhs(tmp_, k3_);
        for (std::size_t i = 0; i < size; ++i) tmp_[i] = u[i] + dt * k3_[i];
        rhs(tmp_, k4_);
        const double w = dt / 6.0;
        double sup = 0.0;
        double lowest = 0.0;
        bool finite = true;
        for (std::size_t i = 0; i < size; ++i) {
            const double v = u[i] + w * (k1_[i] + 2.0 * (k2_[i] + k3_[i]) + k4_[i]);
            u[i] = v;
            finite = finite && std::isfinite(v);
            sup = std::max(sup, std::abs(v));
            lowest = std::min(lowest, v);
        }
        if (!finite) throw NumericalFailure("non-finite value after step");
        if (lowest < 0.0) {
            if (lowest < -1e-12 * std::max(1.0, sup)) throw NumericalFailure("negative undershoot beyond round-off");
            for (double& v : u) v = std::max(v, 0.0);
        }
        return sup;
    }

    SimState step(const SimState& s, double dt) const {
        SimState next = s;
        advance(next.values, dt);
        next.t = s.t + dt;
        next.dt = dt;
        return next;
    }

    SimState step(const SimState& s) const { return step(s, controlled_dt(s)); }

private:
    template <class Reaction>
    void rhs_kernel(const double* u, double* out, Reaction f) const {
        const std::size_t n = grid_->size() - 1;
        const double* left = left_.data();
        const double* right = right_.data();
        out[0] = inner_pinned_ ? 0.0 : f(u[0]) + right[0] * (u[1] - u[0]);
        for (std::size_t i = 1; i < n; ++i) out[i] = f(u[i]) + left[i] * (u[i - 1] - u[i]) + right[i] * (u[i + 1] - u[i]);
        out[n] = active_end_ > n ? f(u[n]) + left[n] * (u[n - 1] - u[n]) : 0.0;
    }

    ModelParams m_;
    std::shared_ptr<const RadialGrid> grid_;
    StepConfig cfg_;
    std::vector<double> left_;
    std::vector<double> right_;
    double dt_diffusion_ = 0.0;
    std::size_t active_end_ = 0;
    bool inner_pinned_ = false;
    int integer_power_ = 0;
    mutable std::vector<double> k1_, k2_, k3_, k4_, tmp_;
};

/// One controlled RK4 step from a state on `grid`.
inline SimState step(const SimState& s, const ModelParams& m, StepConfig cfg = {}) {
    RadialSolver solver(m, s.grid, cfg);
    return solver.step(s);
}

namespace detail {

inline double default_T_ref(const RadialProfile& u0, const ModelParams& m, double t_max,
                            const QuadratureConfig& cfg) {
    try {
        const auto rep = check_blowup_criterion(u0, m, cfg);
        if (rep.blowup_time_bound) return 1.1 * *rep.blowup_time_bound;
    } catch (const NumericalFailure&) {
    }
    return t_max;
}

}  // namespace detail

/// Integrates from u0 until t_max, blowup detection, or step failure.
/// Blowup is declared when sup ≥ blowup_sup_threshold and the controlled
/// step has fallen to dt_floor; t_blow is the detection time.
inline SimResult simulate(const RadialProfile& u0, const ModelParams& m, const GridConfig& grid, double t_max,
                          const SimOptions& opt = {}) {
    if (!(t_max > 0.0)) throw DomainError("t_max must be positive");
    SimState state = init_state(u0, grid);
    const RadialSolver solver(m, state.grid, opt.step);

    SimResult result;
    result.series.T_ref = opt.T_ref ? *opt.T_ref : detail::default_T_ref(u0, m, t_max, opt.quadrature);
    if (!(result.series.T_ref > 0.0)) throw DomainError("T_ref must be positive");
    result.barrier_series.emplace();
    const double interval =
        opt.record_interval > 0.0 ? opt.record_interval : std::min(t_max, result.series.T_ref) / 100.0;

    std::vector<double> snaps;
    for (double ts : opt.snapshot_times)
        if (ts >= 0.0 && ts <= t_max) snaps.push_back(ts);
    std::sort(snaps.begin(), snaps.end());
    std::size_t next_snap = 0;

    auto record = [&](const SimState& s) {
        if (!result.series.entries.empty() && !(s.t > result.series.entries.back().t)) return;
        result.series.entries.push_back(moment_entry(s, result.series.T_ref, m.d));
        result.barrier_series->push_back({s.t, barrier_max(s, m)});
    };
    auto take_snapshots = [&](const SimState& s) {
        while (next_snap < snaps.size() && snaps[next_snap] <= s.t) {
            if (std::abs(snaps[next_snap] - s.t) <= 1e-12 * std::max(1.0, s.t)) result.snapshots.push_back(s);
            ++next_snap;
        }
    };

    record(state);
    take_snapshots(state);
    long long k_record = 1;
    auto next_record_time = [&] { return std::min(t_max, static_cast<double>(k_record) * interval); };

    double sup = state.sup();
    while (true) {
        if (state.t >= t_max) {
            record(state);
            result.outcome = Survived{state.t, sup};
            return result;
        }
        const double dt_ctrl = solver.controlled_dt(sup);
        if (sup >= opt.blowup_sup_threshold && dt_ctrl <= opt.dt_floor) {
            record(state);
            result.outcome = BlewUp{state.t, sup};
            return result;
        }
        if (result.steps >= opt.max_steps) {
            result.outcome = StepFailure{state.t, "step budget exhausted"};
            return result;
        }
        double target = next_record_time();
        if (next_snap < snaps.size()) target = std::min(target, snaps[next_snap]);
        double dt = dt_ctrl;
        bool lands = false;
        if (state.t + dt >= target) {
            dt = target - state.t;
            lands = true;
        }
        try {
            sup = solver.advance(state.values, dt);
        } catch (const NumericalFailure& e) {
            result.outcome = StepFailure{state.t, e.what()};
            return result;
        }
        state.t = lands ? target : state.t + dt;  // landing removes drift from accumulated increments
        state.dt = dt;
        ++result.steps;
        if (lands && target == next_record_time()) {
            record(state);
            ++k_record;
        }
        take_snapshots(state);
    }
}

struct RefinedBlowup {
    SimResult finest;
    std::vector<int> n_cells;
    std::vector<double> t_blow;
    bool converged = false;
};

/// Repeats a blowup run with the grid halved until successive detection
/// times differ by less than rel_change.
inline RefinedBlowup simulate_refined(const RadialProfile& u0, const ModelParams& m, GridConfig grid, double t_max,
                                      const SimOptions& opt = {}, double rel_change = 0.02, int max_levels = 3) {
    RefinedBlowup out;
    for (int level = 0; level < max_levels; ++level) {
        out.finest = simulate(u0, m, grid, t_max, opt);
        out.n_cells.push_back(grid.n_cells);
        if (!out.finest.blew_up()) return out;
        out.t_blow.push_back(out.finest.t_blow());
        const std::size_t k = out.t_blow.size();
        if (k >= 2 && std::abs(out.t_blow[k - 1] - out.t_blow[k - 2]) < rel_change * out.t_blow[k - 2]) {
            out.converged = true;
            return out;
        }
        grid = grid.refined();
    }
    return out;
}

}  // namespace blowup
