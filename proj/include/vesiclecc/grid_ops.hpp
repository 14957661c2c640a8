// grid_ops.hpp
// Staggered cell-centered finite-difference operators with homogeneous
// Neumann boundary conditions. Ghost cells are never stored; boundary
// behavior comes from index mirroring, which leaves boundary-normal
// gradient entries exactly zero and makes every divergence conservative.

#pragma once

#include "vesiclecc/field.hpp"

namespace vcc {

// D_x phi, D_y phi on faces. Boundary-normal entries are exactly 0.
inline void grad_faces_into(FaceFieldPair& out, const ScalarField& phi) {
    const Grid& g = phi.grid;
    if (out.grid != g) out = FaceFieldPair(g);
    const int m = g.m, n = g.n;
    const double ih = 1.0 / g.h;
    for (int j = 0; j < n; ++j) {
        out.e(0, j) = 0.0;
        for (int k = 1; k < m; ++k) out.e(k, j) = (phi(k, j) - phi(k - 1, j)) * ih;
        out.e(m, j) = 0.0;
    }
    for (int i = 0; i < m; ++i) out.s(i, 0) = 0.0;
    for (int j = 1; j < n; ++j)
        for (int i = 0; i < m; ++i) out.s(i, j) = (phi(i, j) - phi(i, j - 1)) * ih;
    for (int i = 0; i < m; ++i) out.s(i, n) = 0.0;
}

inline FaceFieldPair grad_faces(const ScalarField& phi) {
    FaceFieldPair out(phi.grid);
    grad_faces_into(out, phi);
    return out;
}

// Conservative divergence d_x f + d_y g back to cell centers.
inline void div_centers_into(ScalarField& out, const FaceFieldPair& flux) {
    const Grid& g = flux.grid;
    if (out.grid != g) out = ScalarField(g);
    const int m = g.m, n = g.n;
    const double ih = 1.0 / g.h;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < m; ++i)
            out(i, j) = (flux.e(i + 1, j) - flux.e(i, j) + flux.s(i, j + 1) - flux.s(i, j)) * ih;
}

inline ScalarField div_centers(const FaceFieldPair& flux) {
    ScalarField out(flux.grid);
    div_centers_into(out, flux);
    return out;
}

// 5-point Laplacian with mirrored ghosts; identical to div(grad(.)).
inline void laplacian_into(ScalarField& out, const ScalarField& phi) {
    const Grid& g = phi.grid;
    if (out.grid != g) out = ScalarField(g);
    const int m = g.m, n = g.n;
    const double ih2 = 1.0 / (g.h * g.h);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < m; ++i) {
            double c = phi(i, j);
            double xm = (i > 0) ? phi(i - 1, j) : c;
            double xp = (i < m - 1) ? phi(i + 1, j) : c;
            double ym = (j > 0) ? phi(i, j - 1) : c;
            double yp = (j < n - 1) ? phi(i, j + 1) : c;
            out(i, j) = (xm + xp + ym + yp - 4.0 * c) * ih2;
        }
}

inline ScalarField laplacian(const ScalarField& phi) {
    ScalarField out(phi.grid);
    laplacian_into(out, phi);
    return out;
}

// Arithmetic two-point face means A_x, A_y; boundary faces mirror the
// adjacent cell value.
inline void avg_faces_into(FaceFieldPair& out, const ScalarField& phi) {
    const Grid& g = phi.grid;
    if (out.grid != g) out = FaceFieldPair(g);
    const int m = g.m, n = g.n;
    for (int j = 0; j < n; ++j) {
        out.e(0, j) = phi(0, j);
        for (int k = 1; k < m; ++k) out.e(k, j) = 0.5 * (phi(k - 1, j) + phi(k, j));
        out.e(m, j) = phi(m - 1, j);
    }
    for (int i = 0; i < m; ++i) out.s(i, 0) = phi(i, 0);
    for (int j = 1; j < n; ++j)
        for (int i = 0; i < m; ++i) out.s(i, j) = 0.5 * (phi(i, j - 1) + phi(i, j));
    for (int i = 0; i < m; ++i) out.s(i, n) = phi(i, n - 1);
}

inline FaceFieldPair avg_faces(const ScalarField& phi) {
    FaceFieldPair out(phi.grid);
    avg_faces_into(out, phi);
    return out;
}

// Quadratic face average of phi^2: (a^2 + a b + b^2)/3 across each face.
// Satisfies D_x(phi^3) = 3 A_x^q(phi^2) D_x(phi) entrywise.
inline FaceFieldPair quad_avg_faces(const ScalarField& phi) {
    const Grid& g = phi.grid;
    FaceFieldPair out(g);
    const int m = g.m, n = g.n;
    auto q = [](double a, double b) { return (a * a + a * b + b * b) / 3.0; };
    for (int j = 0; j < n; ++j) {
        out.e(0, j) = q(phi(0, j), phi(0, j));
        for (int k = 1; k < m; ++k) out.e(k, j) = q(phi(k - 1, j), phi(k, j));
        out.e(m, j) = q(phi(m - 1, j), phi(m - 1, j));
    }
    for (int i = 0; i < m; ++i) out.s(i, 0) = q(phi(i, 0), phi(i, 0));
    for (int j = 1; j < n; ++j)
        for (int i = 0; i < m; ++i) out.s(i, j) = q(phi(i, j - 1), phi(i, j));
    for (int i = 0; i < m; ++i) out.s(i, n) = q(phi(i, n - 1), phi(i, n - 1));
    return out;
}

// M_psi(s) = 1 - M0 (s^2 - 1)^2, evaluated pointwise.
inline double mobility_value(double s, double m0) {
    double t = s * s - 1.0;
    return 1.0 - m0 * t * t;
}

// Face mobilities M_psi(A_x phi), M_psi(A_y phi).
inline void mobility_faces_into(FaceFieldPair& out, const ScalarField& phi, double m0) {
    avg_faces_into(out, phi);
    for (double& x : out.ew) x = mobility_value(x, m0);
    for (double& x : out.ns) x = mobility_value(x, m0);
}

inline FaceFieldPair mobility_faces(const ScalarField& phi, double m0) {
    FaceFieldPair out(phi.grid);
    mobility_faces_into(out, phi, m0);
    return out;
}

inline double min_face_value(const FaceFieldPair& f) {
    double r = f.ew.empty() ? 0.0 : f.ew[0];
    for (double x : f.ew) r = std::min(r, x);
    for (double x : f.ns) r = std::min(r, x);
    return r;
}

// d_x(Mf D_x nu) + d_y(Mf D_y nu) with precomputed face coefficients.
// Boundary-normal fluxes are zero, so the output sums to zero.
inline void mobility_div_faces_into(ScalarField& out, const FaceFieldPair& mf,
                                    const ScalarField& nu, FaceFieldPair& work) {
    grad_faces_into(work, nu);
    const Grid& g = nu.grid;
    const int m = g.m, n = g.n;
    if (out.grid != g) out = ScalarField(g);
    const double ih = 1.0 / g.h;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < m; ++i) {
            double fe = mf.e(i + 1, j) * work.e(i + 1, j) - mf.e(i, j) * work.e(i, j);
            double fn = mf.s(i, j + 1) * work.s(i, j + 1) - mf.s(i, j) * work.s(i, j);
            out(i, j) = (fe + fn) * ih;
        }
}

// Conservative variable-mobility operator of the Cahn-Hilliard flux,
// with the mobility evaluated from phi_star at face centers.
inline ScalarField mobility_div(const ScalarField& phi_star, const ScalarField& nu, double m0) {
    require_same_grid(phi_star.grid, nu.grid, "mobility_div");
    FaceFieldPair mf = mobility_faces(phi_star, m0);
    FaceFieldPair work(nu.grid);
    ScalarField out(nu.grid);
    mobility_div_faces_into(out, mf, nu, work);
    return out;
}

// |grad phi|^2 averaged back to cell centers: half-weighted mean of the
// squared one-sided face gradients in each direction.
inline void center_grad_sq_into(ScalarField& out, const ScalarField& phi, FaceFieldPair& work) {
    grad_faces_into(work, phi);
    const Grid& g = phi.grid;
    if (out.grid != g) out = ScalarField(g);
    const int m = g.m, n = g.n;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < m; ++i) {
            double ex = work.e(i, j), ep = work.e(i + 1, j);
            double sy = work.s(i, j), sp = work.s(i, j + 1);
            out(i, j) = 0.5 * (ex * ex + ep * ep) + 0.5 * (sy * sy + sp * sp);
        }
}

inline ScalarField center_grad_sq(const ScalarField& phi) {
    FaceFieldPair work(phi.grid);
    ScalarField out(phi.grid);
    center_grad_sq_into(out, phi, work);
    return out;
}

// Compatible discretization of the nonlocal bending pair:
// first  = phi * (face-averaged |grad phi|^2)
// second = d_x(A_x(phi^2) D_x phi) + d_y(A_y(phi^2) D_y phi)
inline void nonlocal_bending_pair_into(ScalarField& first, ScalarField& second,
                                       const ScalarField& phi, FaceFieldPair& grad,
                                       FaceFieldPair& flux) {
    const Grid& g = phi.grid;
    const int m = g.m, n = g.n;
    grad_faces_into(grad, phi);
    if (first.grid != g) first = ScalarField(g);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < m; ++i) {
            double ex = grad.e(i, j), ep = grad.e(i + 1, j);
            double sy = grad.s(i, j), sp = grad.s(i, j + 1);
            first(i, j) = phi(i, j) * (0.5 * (ex * ex + ep * ep) + 0.5 * (sy * sy + sp * sp));
        }
    if (flux.grid != g) flux = FaceFieldPair(g);
    for (int j = 0; j < n; ++j) {
        flux.e(0, j) = 0.0;
        for (int k = 1; k < m; ++k) {
            double a = phi(k - 1, j), b = phi(k, j);
            flux.e(k, j) = 0.5 * (a * a + b * b) * grad.e(k, j);
        }
        flux.e(m, j) = 0.0;
    }
    for (int i = 0; i < m; ++i) flux.s(i, 0) = 0.0;
    for (int j = 1; j < n; ++j)
        for (int i = 0; i < m; ++i) {
            double a = phi(i, j - 1), b = phi(i, j);
            flux.s(i, j) = 0.5 * (a * a + b * b) * grad.s(i, j);
        }
    for (int i = 0; i < m; ++i) flux.s(i, n) = 0.0;
    div_centers_into(second, flux);
}

inline std::pair<ScalarField, ScalarField> nonlocal_bending_pair(const ScalarField& phi) {
    ScalarField first(phi.grid), second(phi.grid);
    FaceFieldPair grad(phi.grid), flux(phi.grid);
    nonlocal_bending_pair_into(first, second, phi, grad, flux);
    return {std::move(first), std::move(second)};
}

// ||grad_h phi||^2 in the edge-weighted face inner product.
inline double grad_norm_sq(const ScalarField& phi) {
    FaceFieldPair g = grad_faces(phi);
    return face_inner(g, g);
}

}  // namespace vcc
