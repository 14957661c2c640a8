// dense_oracle.hpp
// Independent dense-matrix assembly of every discrete operator, straight
// from the index definitions, plus a plain LU solver. Used as the oracle
// the fast implementations are checked against; deliberately shares no
// code with the library's operator kernels.

#pragma once

#include <random>
#include <vector>

#include "vesiclecc/vesiclecc.hpp"

namespace oracle {

using vcc::Grid;
using vcc::ScalarField;

using Vec = std::vector<double>;
struct Mat {
    int rows = 0, cols = 0;
    Vec a;
    Mat() = default;
    Mat(int r, int c) : rows(r), cols(c), a(std::size_t(r) * c, 0.0) {}
    double& at(int r, int c) { return a[std::size_t(r) * cols + c]; }
    double at(int r, int c) const { return a[std::size_t(r) * cols + c]; }
};

inline Vec matvec(const Mat& m, const Vec& x) {
    Vec y(m.rows, 0.0);
    for (int r = 0; r < m.rows; ++r) {
        double s = 0.0;
        for (int c = 0; c < m.cols; ++c) s += m.at(r, c) * x[c];
        y[r] = s;
    }
    return y;
}

inline Mat matmul(const Mat& A, const Mat& B) {
    Mat C(A.rows, B.cols);
    for (int r = 0; r < A.rows; ++r)
        for (int k = 0; k < A.cols; ++k) {
            double v = A.at(r, k);
            if (v == 0.0) continue;
            for (int c = 0; c < B.cols; ++c) C.at(r, c) += v * B.at(k, c);
        }
    return C;
}

inline Mat matadd(const Mat& A, double alpha, const Mat& B) {
    Mat C = A;
    for (std::size_t p = 0; p < C.a.size(); ++p) C.a[p] += alpha * B.a[p];
    return C;
}

inline Mat identity(int n) {
    Mat I(n, n);
    for (int i = 0; i < n; ++i) I.at(i, i) = 1.0;
    return I;
}

// LU with partial pivoting; returns pivot magnitudes for rank inspection.
inline Vec lu_factor(Mat& A, std::vector<int>& perm) {
    const int n = A.rows;
    perm.resize(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    Vec pivots(n, 0.0);
    for (int c = 0; c < n; ++c) {
        int best = c;
        for (int r = c + 1; r < n; ++r)
            if (std::abs(A.at(r, c)) > std::abs(A.at(best, c))) best = r;
        if (best != c) {
            for (int k = 0; k < n; ++k) std::swap(A.at(c, k), A.at(best, k));
            std::swap(perm[c], perm[best]);
        }
        pivots[c] = std::abs(A.at(c, c));
        if (A.at(c, c) == 0.0) continue;
        for (int r = c + 1; r < n; ++r) {
            double m = A.at(r, c) / A.at(c, c);
            A.at(r, c) = m;
            for (int k = c + 1; k < n; ++k) A.at(r, k) -= m * A.at(c, k);
        }
    }
    return pivots;
}

inline Vec lu_solve(const Mat& A_in, const Vec& b_in) {
    Mat A = A_in;
    std::vector<int> perm;
    lu_factor(A, perm);
    const int n = A.rows;
    Vec x(n);
    for (int i = 0; i < n; ++i) x[i] = b_in[perm[i]];
    for (int r = 1; r < n; ++r)
        for (int c = 0; c < r; ++c) x[r] -= A.at(r, c) * x[c];
    for (int r = n - 1; r >= 0; --r) {
        for (int c = r + 1; c < n; ++c) x[r] -= A.at(r, c) * x[c];
        x[r] /= A.at(r, r);
    }
    return x;
}

// --- index helpers ---------------------------------------------------------

inline int cid(const Grid& g, int i, int j) { return j * g.m + i; }             // cells
inline int eid(const Grid& g, int k, int j) { return j * (g.m + 1) + k; }       // ew faces
inline int sid(const Grid& g, int i, int j) { return j * g.m + i; }             // ns faces

inline int n_cells(const Grid& g) { return g.m * g.n; }
inline int n_ew(const Grid& g) { return (g.m + 1) * g.n; }
inline int n_ns(const Grid& g) { return g.m * (g.n + 1); }

// --- dense operators ---------------------------------------------------------

// D_x: cells -> ew faces (boundary rows identically zero)
inline Mat dense_grad_x(const Grid& g) {
    Mat A(n_ew(g), n_cells(g));
    for (int j = 0; j < g.n; ++j)
        for (int k = 1; k < g.m; ++k) {
            A.at(eid(g, k, j), cid(g, k, j)) = 1.0 / g.h;
            A.at(eid(g, k, j), cid(g, k - 1, j)) = -1.0 / g.h;
        }
    return A;
}

inline Mat dense_grad_y(const Grid& g) {
    Mat A(n_ns(g), n_cells(g));
    for (int j = 1; j < g.n; ++j)
        for (int i = 0; i < g.m; ++i) {
            A.at(sid(g, i, j), cid(g, i, j)) = 1.0 / g.h;
            A.at(sid(g, i, j), cid(g, i, j - 1)) = -1.0 / g.h;
        }
    return A;
}

// d_x: ew faces -> cells
inline Mat dense_div_x(const Grid& g) {
    Mat A(n_cells(g), n_ew(g));
    for (int j = 0; j < g.n; ++j)
        for (int i = 0; i < g.m; ++i) {
            A.at(cid(g, i, j), eid(g, i + 1, j)) = 1.0 / g.h;
            A.at(cid(g, i, j), eid(g, i, j)) = -1.0 / g.h;
        }
    return A;
}

inline Mat dense_div_y(const Grid& g) {
    Mat A(n_cells(g), n_ns(g));
    for (int j = 0; j < g.n; ++j)
        for (int i = 0; i < g.m; ++i) {
            A.at(cid(g, i, j), sid(g, i, j + 1)) = 1.0 / g.h;
            A.at(cid(g, i, j), sid(g, i, j)) = -1.0 / g.h;
        }
    return A;
}

inline Mat dense_avg_x(const Grid& g) {
    Mat A(n_ew(g), n_cells(g));
    for (int j = 0; j < g.n; ++j) {
        A.at(eid(g, 0, j), cid(g, 0, j)) = 1.0;
        for (int k = 1; k < g.m; ++k) {
            A.at(eid(g, k, j), cid(g, k - 1, j)) = 0.5;
            A.at(eid(g, k, j), cid(g, k, j)) = 0.5;
        }
        A.at(eid(g, g.m, j), cid(g, g.m - 1, j)) = 1.0;
    }
    return A;
}

inline Mat dense_avg_y(const Grid& g) {
    Mat A(n_ns(g), n_cells(g));
    for (int i = 0; i < g.m; ++i) {
        A.at(sid(g, i, 0), cid(g, i, 0)) = 1.0;
        A.at(sid(g, i, g.n), cid(g, i, g.n - 1)) = 1.0;
    }
    for (int j = 1; j < g.n; ++j)
        for (int i = 0; i < g.m; ++i) {
            A.at(sid(g, i, j), cid(g, i, j - 1)) = 0.5;
            A.at(sid(g, i, j), cid(g, i, j)) = 0.5;
        }
    return A;
}

inline Mat dense_laplacian(const Grid& g) {
    Mat L = matmul(dense_div_x(g), dense_grad_x(g));
    Mat Ly = matmul(dense_div_y(g), dense_grad_y(g));
    return matadd(L, 1.0, Ly);
}

// div(diag(coef) grad): cells -> cells, with per-face coefficients produced
// from the cell field by `facefn(left, right)`.
template <typename F>
inline Mat dense_var_coef_div_grad(const Grid& g, const ScalarField& phi, F&& facefn) {
    Mat Dx = dense_grad_x(g), Dy = dense_grad_y(g);
    // scale face rows in place
    for (int j = 0; j < g.n; ++j) {
        for (int k = 0; k <= g.m; ++k) {
            int lc = std::max(k - 1, 0), rc = std::min(k, g.m - 1);
            double c = facefn(phi(lc, j), phi(rc, j));
            for (int col = 0; col < Dx.cols; ++col) Dx.at(eid(g, k, j), col) *= c;
        }
    }
    for (int j = 0; j <= g.n; ++j) {
        int lj = std::max(j - 1, 0), rj = std::min(j, g.n - 1);
        for (int i = 0; i < g.m; ++i) {
            double c = facefn(phi(i, lj), phi(i, rj));
            for (int col = 0; col < Dy.cols; ++col) Dy.at(sid(g, i, j), col) *= c;
        }
    }
    Mat A = matmul(dense_div_x(g), Dx);
    Mat Ay = matmul(dense_div_y(g), Dy);
    return matadd(A, 1.0, Ay);
}

inline Mat dense_mobility_op(const Grid& g, const ScalarField& phi, double m0) {
    return dense_var_coef_div_grad(g, phi, [m0](double a, double b) {
        double s = 0.5 * (a + b);
        double t = s * s - 1.0;
        return 1.0 - m0 * t * t;
    });
}

// d(A(phi^2) D phi) operator applied through the matrix route
inline Mat dense_bending_div_op(const Grid& g, const ScalarField& phi) {
    return dense_var_coef_div_grad(g, phi,
                                   [](double a, double b) { return 0.5 * (a * a + b * b); });
}

inline Mat dense_chi(const Grid& g, const vcc::ChiCoeffs& c) {
    Mat L = dense_laplacian(g);
    Mat L2 = matmul(L, L);
    Mat A = identity(n_cells(g));
    for (std::size_t p = 0; p < A.a.size(); ++p)
        A.a[p] = c.c1 * A.a[p] - c.c2 * L.a[p] + c.c3 * L2.a[p];
    return A;
}

inline Mat dense_zeta(const Grid& g, double mass_coeff, double lambda) {
    Mat L = dense_laplacian(g);
    Mat A = identity(n_cells(g));
    for (std::size_t p = 0; p < A.a.size(); ++p) A.a[p] = mass_coeff * A.a[p] - lambda * L.a[p];
    return A;
}

inline Mat dense_zeta_classical(const Grid& g, const ScalarField& phi_star, double m0,
                                double mass_coeff, double lambda) {
    Mat M = dense_mobility_op(g, phi_star, m0);
    Mat A = identity(n_cells(g));
    for (std::size_t p = 0; p < A.a.size(); ++p) A.a[p] = mass_coeff * A.a[p] - lambda * M.a[p];
    return A;
}

inline Mat dense_smoothing_op(const Grid& g, double mob, double eps, double dt) {
    Mat L = dense_laplacian(g);
    Mat L2 = matmul(L, L);
    Mat A = identity(n_cells(g));
    for (std::size_t p = 0; p < A.a.size(); ++p) A.a[p] = A.a[p] / dt + mob * eps * L2.a[p];
    return A;
}

// --- helpers ----------------------------------------------------------------

inline ScalarField random_field(const Grid& g, unsigned seed, double lo = -1.0, double hi = 1.0) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> dist(lo, hi);
    ScalarField f(g);
    for (double& x : f.v) x = dist(rng);
    return f;
}

inline vcc::FaceFieldPair random_flux(const Grid& g, unsigned seed, bool zero_boundary) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    vcc::FaceFieldPair f(g);
    for (double& x : f.ew) x = dist(rng);
    for (double& x : f.ns) x = dist(rng);
    if (zero_boundary) {
        for (int j = 0; j < g.n; ++j) f.e(0, j) = f.e(g.m, j) = 0.0;
        for (int i = 0; i < g.m; ++i) f.s(i, 0) = f.s(i, g.n) = 0.0;
    }
    return f;
}

inline Vec to_vec(const ScalarField& f) { return f.v; }

inline ScalarField from_vec(const Grid& g, const Vec& v) {
    ScalarField f(g);
    f.v = v;
    return f;
}

inline Vec ew_to_vec(const vcc::FaceFieldPair& f) { return f.ew; }
inline Vec ns_to_vec(const vcc::FaceFieldPair& f) { return f.ns; }

inline double rel_err(const Vec& got, const Vec& want) {
    double num = 0.0, den = 0.0;
    for (std::size_t p = 0; p < got.size(); ++p) {
        num = std::max(num, std::abs(got[p] - want[p]));
        den = std::max(den, std::abs(want[p]));
    }
    return num / std::max(den, 1e-300);
}

}  // namespace oracle
