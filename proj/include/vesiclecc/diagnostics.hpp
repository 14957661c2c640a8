// diagnostics.hpp
// Field comparison norms, the cell-centered bicubic restriction used by the
// grid-refinement studies, per-step time series rows, and the energy
// monotonicity checker.

#pragma once

#include <limits>

#include "vesiclecc/energy.hpp"

namespace vcc {

struct FieldDiff {
    double l2 = 0.0;
    double linf = 0.0;
    double rel_l2 = 0.0;
};

inline FieldDiff compare_fields(const ScalarField& a, const ScalarField& b) {
    require_same_grid(a.grid, b.grid, "compare_fields");
    FieldDiff d;
    KahanSum acc;
    for (std::size_t p = 0; p < a.size(); ++p) {
        double e = a.v[p] - b.v[p];
        acc.add(e * e);
        d.linf = std::max(d.linf, std::abs(e));
    }
    d.l2 = std::sqrt(a.grid.h * a.grid.h * acc.value());
    double ref = std::max(l2_norm(a), l2_norm(b));
    d.rel_l2 = d.l2 / (ref + 1e-300);
    return d;
}

// Arc-length diagnostic: the integral of f_surf, whose deviation from
// a_target is what the area penalty acts on.
inline double arc_length(const ScalarField& phi, const PhysParams& pp) {
    return arc_length_integral(phi, pp);
}

// Restrict a field on a 2N grid to the N grid at cell centers. Each coarse
// center falls halfway between fine centers in both directions; the
// tensor-product 4-point cubic stencil (-1/16, 9/16, 9/16, -1/16) with
// Neumann-mirrored edge indices reproduces cubics exactly.
inline ScalarField bicubic_restrict(const ScalarField& fine, const Grid& coarse) {
    const Grid& gf = fine.grid;
    if (gf.m != 2 * coarse.m || gf.n != 2 * coarse.n)
        throw std::invalid_argument("bicubic_restrict: fine grid must be 2x the coarse grid");
    auto mirror = [](int i, int n) {
        if (i < 0) i = -1 - i;
        if (i >= n) i = 2 * n - 1 - i;
        return i;
    };
    static const double w[4] = {-1.0 / 16.0, 9.0 / 16.0, 9.0 / 16.0, -1.0 / 16.0};
    ScalarField out(coarse);
    std::vector<double> rowbuf(4);
    for (int J = 0; J < coarse.n; ++J) {
        for (int I = 0; I < coarse.m; ++I) {
            double s = 0.0;
            for (int dj = 0; dj < 4; ++dj) {
                int jf = mirror(2 * J - 1 + dj, gf.n);
                double r = 0.0;
                for (int di = 0; di < 4; ++di) {
                    int ifid = mirror(2 * I - 1 + di, gf.m);
                    r += w[di] * fine(ifid, jf);
                }
                s += w[dj] * r;
            }
            out(I, J) = s;
        }
    }
    return out;
}

// One recorded step of a simulation run.
struct TimeSeriesRow {
    long step = 0;
    double t = 0.0;
    double F_surf = 0, F_bend = 0, F_area = 0, F_osm = 0, F_total = 0;
    double E_mod = 0;
    double mass_phi = 0, mass_psi = 0;
    double arc_length = 0;
    double V = 0, U = 0, W = 0, Z = 0;
    double ac_residual = 0, ch_residual = 0;
    double ch_solver_seconds = 0;
    int pcg_iters = 0;
};

// Flags any step where E_mod rises by more than 1e-10 of its magnitude.
struct EnergyMonotonicityChecker {
    bool have_prev = false;
    double prev = 0.0;
    long violations = 0;
    double worst_rise = 0.0;

    void observe(double e_mod) {
        if (have_prev) {
            double rise = e_mod - prev;
            if (rise > 1e-10 * std::abs(prev)) {
                ++violations;
                worst_rise = std::max(worst_rise, rise);
            }
        }
        prev = e_mod;
        have_prev = true;
    }
};

// Errors and rates between consecutive refinement levels (combined error
// is sqrt(e_phi^2 + e_psi^2); rates are log2 ratios).
struct ConvergenceLevel {
    double param = 0.0;  // dt or N
    double err_phi = std::numeric_limits<double>::quiet_NaN();
    double err_psi = std::numeric_limits<double>::quiet_NaN();
    double err_comb = std::numeric_limits<double>::quiet_NaN();
};

struct ConvergenceReport {
    std::vector<ConvergenceLevel> levels;
    std::vector<double> rate_phi;   // between consecutive levels
    std::vector<double> rate_psi;
    std::vector<double> rate_comb;

    void compute_rates() {
        rate_phi.clear();
        rate_psi.clear();
        rate_comb.clear();
        for (std::size_t i = 1; i < levels.size(); ++i) {
            rate_phi.push_back(std::log2(levels[i - 1].err_phi / levels[i].err_phi));
            rate_psi.push_back(std::log2(levels[i - 1].err_psi / levels[i].err_psi));
            rate_comb.push_back(std::log2(levels[i - 1].err_comb / levels[i].err_comb));
        }
    }
};

}  // namespace vcc
