// spectral.hpp
// Diagonalization of the Neumann discrete Laplacian and fast direct solvers
// for the constant-coefficient operators of the scheme:
//   chi(phi)  = C1 phi - C2 Lap phi + C3 Lap^2 phi      (fourth order)
//   zeta(psi) = (a - lambda Lap) psi                    (second order)
// plus the biharmonic smoothing solve and the mean-mobility Poisson
// preconditioner used by the classical baseline.

#pragma once

#include <numbers>

#include "vesiclecc/dct.hpp"
#include "vesiclecc/grid_ops.hpp"

namespace vcc {

// Eigenvalues of the Neumann Laplacian on the cell-centered grid, stored in
// coefficient layout (x mode fastest). lam[0] = 0; all others negative.
struct EigTable {
    Grid grid;
    std::vector<double> lam;

    EigTable() = default;
    explicit EigTable(const Grid& g) : grid(g), lam(g.cells()) {
        const double ih2 = 4.0 / (g.h * g.h);
        std::vector<double> lx(g.m), ly(g.n);
        for (int k = 0; k < g.m; ++k) {
            double s = std::sin(std::numbers::pi * k / (2.0 * g.m));
            lx[k] = -ih2 * s * s;
        }
        for (int k = 0; k < g.n; ++k) {
            double s = std::sin(std::numbers::pi * k / (2.0 * g.n));
            ly[k] = -ih2 * s * s;
        }
        for (int j = 0; j < g.n; ++j)
            for (int i = 0; i < g.m; ++i) lam[std::size_t(j) * g.m + i] = lx[i] + ly[j];
    }
};

// Coefficients of the Allen-Cahn operator chi. C1 carries the BDF mass
// term, so it stays strictly positive and chi is always invertible.
struct ChiCoeffs {
    double c1 = 0.0;
    double c2 = 0.0;
    double c3 = 0.0;
};

inline std::vector<double> chi_symbol(const EigTable& eig, const ChiCoeffs& c) {
    if (!(c.c1 > 0.0) || c.c2 < 0.0 || c.c3 < 0.0)
        throw std::invalid_argument("chi_symbol: need c1 > 0, c2, c3 >= 0");
    std::vector<double> sym(eig.lam.size());
    for (std::size_t p = 0; p < sym.size(); ++p) {
        double l = eig.lam[p];
        sym[p] = c.c1 - c.c2 * l + c.c3 * l * l;
    }
    return sym;
}

inline std::vector<double> zeta_symbol(const EigTable& eig, double mass_coeff, double lambda) {
    if (!(mass_coeff > 0.0) || lambda < 0.0)
        throw std::invalid_argument("zeta_symbol: need mass_coeff > 0, lambda >= 0");
    std::vector<double> sym(eig.lam.size());
    for (std::size_t p = 0; p < sym.size(); ++p) sym[p] = mass_coeff - lambda * eig.lam[p];
    return sym;
}

// (1/dt + M eps Lap^2), the implicit operator of the IC smoothing stage.
inline std::vector<double> smoothing_symbol(const EigTable& eig, double mob, double eps,
                                            double dt) {
    std::vector<double> sym(eig.lam.size());
    for (std::size_t p = 0; p < sym.size(); ++p) {
        double l = eig.lam[p];
        sym[p] = 1.0 / dt + mob * eps * l * l;
    }
    return sym;
}

// Solve op(x) = rhs for every field in the batch by one forward pass,
// pointwise division by the operator symbol, and one inverse pass.
// Fields are overwritten with the solutions.
inline void solve_diagonal(Dct2& plan, const std::vector<double>& symbol,
                           std::span<ScalarField*> fields) {
    if (fields.empty()) return;
    const int count = int(fields.size());
    if (count > plan.batch()) throw std::invalid_argument("solve_diagonal: batch too large");
    const std::size_t fs = plan.field_size();
    for (int b = 0; b < count; ++b) {
        require_same_grid(fields[b]->grid, fields[0]->grid, "solve_diagonal");
        std::memcpy(plan.slot(b), fields[b]->data(), sizeof(double) * fs);
    }
    plan.forward(count);
    for (int b = 0; b < count; ++b) {
        double* p = plan.slot(b);
        for (std::size_t q = 0; q < fs; ++q) p[q] /= symbol[q];
    }
    plan.inverse(count);
    for (int b = 0; b < count; ++b)
        std::memcpy(fields[b]->data(), plan.slot(b), sizeof(double) * fs);
}

inline void solve_chi(Dct2& plan, const EigTable& eig, const ChiCoeffs& c,
                      std::span<ScalarField*> fields) {
    solve_diagonal(plan, chi_symbol(eig, c), fields);
}

inline void solve_zeta_cc(Dct2& plan, const EigTable& eig, double mass_coeff, double lambda,
                          std::span<ScalarField*> fields) {
    solve_diagonal(plan, zeta_symbol(eig, mass_coeff, lambda), fields);
}

// One implicit smoothing solve: returns x with (1/dt + M eps Lap^2) x = rhs.
// The zero mode passes through 1/dt, so the evolved field's mean follows the
// mean of rhs exactly (mass conservation of the smoothing stage).
inline void solve_smoothing_ch(Dct2& plan, const EigTable& eig, double mob, double eps, double dt,
                               ScalarField& rhs_inout) {
    ScalarField* f = &rhs_inout;
    solve_diagonal(plan, smoothing_symbol(eig, mob, eps, dt), std::span<ScalarField*>(&f, 1));
}

// Poisson preconditioner for the classical variable-coefficient zeta:
// applies (mass_coeff - lambda * mbar * Lap)^(-1) with mbar the spatial
// mean mobility. Exact inverse when the mobility is constant.
class DctPoissonPreconditioner {
  public:
    DctPoissonPreconditioner(const EigTable& eig, double mass_coeff, double lambda, double mbar)
        : grid_(eig.grid), plan_(eig.grid.m, eig.grid.n, 1) {
        if (!(mbar > 0.0)) throw std::invalid_argument("preconditioner: mean mobility must be > 0");
        symbol_ = zeta_symbol(eig, mass_coeff, lambda * mbar);
    }

    void apply(const ScalarField& r, ScalarField& z) {
        if (z.grid != grid_) z = ScalarField(grid_);
        std::memcpy(plan_.slot(0), r.data(), sizeof(double) * plan_.field_size());
        plan_.forward(1);
        double* p = plan_.slot(0);
        for (std::size_t q = 0; q < plan_.field_size(); ++q) p[q] /= symbol_[q];
        plan_.inverse(1);
        std::memcpy(z.data(), plan_.slot(0), sizeof(double) * plan_.field_size());
    }

  private:
    Grid grid_;
    Dct2 plan_;
    std::vector<double> symbol_;
};

}  // namespace vcc
