#pragma once

// Radial grids and solution snapshots shared by the solver and diagnostics.

#include <cmath>
#include <limits>
#include <memory>
#include <vector>

#include "blowup/error.hpp"

namespace blowup {

enum class Spacing { uniform, log };

struct GridConfig {
    double r_min = 1e-3;
    double r_max = 50.0;
    int n_cells = 4096;
    Spacing spacing = Spacing::uniform;
    /// Place the first node at r = 0 (symmetric stencil for smooth data).
    bool origin_node = false;
    /// Zero-flux outer boundary instead of a Dirichlet far-field value.
    bool outer_neumann = false;
    /// Hold the innermost node at its initial value (Dirichlet at r_min)
    /// instead of the zero-flux condition.
    bool inner_dirichlet = false;

    void validate() const {
        if (n_cells < 64) throw DomainError("grid needs n_cells >= 64");
        if (!(r_max > 0.0) || !std::isfinite(r_max)) throw DomainError("grid needs a finite r_max > 0");
        if (origin_node) {
            if (spacing == Spacing::log) throw DomainError("a node at r = 0 requires uniform spacing");
            if (inner_dirichlet) throw DomainError("a node at r = 0 cannot carry a Dirichlet value");
            return;
        }
        if (!(r_min > 0.0) || !(r_min < r_max)) throw DomainError("grid needs 0 < r_min < r_max");
    }

    GridConfig refined() const {
        GridConfig g = *this;
        g.n_cells *= 2;
        return g;
    }
};

/// Node radii r_0 < … < r_n of a radial grid.
class RadialGrid {
public:
    explicit RadialGrid(const GridConfig& cfg) : cfg_(cfg) {
        cfg.validate();
        const auto n = static_cast<std::size_t>(cfg.n_cells);
        r_.resize(n + 1);
        const double lo = cfg.origin_node ? 0.0 : cfg.r_min;
        for (std::size_t i = 0; i <= n; ++i) {
            const double s = static_cast<double>(i) / static_cast<double>(n);
            r_[i] = cfg.spacing == Spacing::uniform ? lo + s * (cfg.r_max - lo) : lo * std::pow(cfg.r_max / lo, s);
        }
        r_[n] = cfg.r_max;
    }

    const GridConfig& config() const { return cfg_; }
    const std::vector<double>& radii() const { return r_; }
    std::size_t size() const { return r_.size(); }

    double min_spacing() const {
        double h = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i + 1 < r_.size(); ++i) h = std::min(h, r_[i + 1] - r_[i]);
        return h;
    }

private:
    GridConfig cfg_;
    std::vector<double> r_;
};

/// Solution snapshot at time t. Beyond the last node the state is taken to
/// continue as u_n·(r/r_n)^{−tail_exponent} (zero when u_n = 0).
struct SimState {
    double t = 0.0;
    std::vector<double> values;
    double dt = 0.0;
    std::shared_ptr<const RadialGrid> grid;
    double tail_exponent = std::numeric_limits<double>::infinity();

    const std::vector<double>& radii() const { return grid->radii(); }

    double sup() const {
        double s = 0.0;
        for (double v : values) s = std::max(s, std::abs(v));
        return s;
    }
};

}  // namespace blowup
