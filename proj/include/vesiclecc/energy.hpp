// energy.hpp
// Energy densities, energy integrals, SAV initialization, the five
// variational-derivative fields S, H, Q, K, P, and the modified discrete
// energy ledger of the BDF2 scheme.
//
// Discrete conventions: gradient-square integrals use the half-weighted
// face average brought back to cell centers (center_grad_sq), which makes
// every SAV definition variationally consistent with its derivative field
// under the staggered SBP identities.

#pragma once

#include <numbers>
#include <optional>

#include "vesiclecc/grid_ops.hpp"
#include "vesiclecc/params.hpp"

namespace vcc {

// --- pointwise model functions -------------------------------------------

inline double double_well(double phi) {
    double t = phi * phi - 1.0;
    return 0.25 * t * t;
}
inline double double_well_prime(double phi) { return phi * (phi * phi - 1.0); }
inline double p_interp(double phi) { return std::sin(0.5 * std::numbers::pi * phi); }
inline double p_prime(double phi) {
    return 0.5 * std::numbers::pi * std::cos(0.5 * std::numbers::pi * phi);
}
inline double f_in(double psi, const PhysParams& pp) {
    double d = psi - pp.psi_in;
    return 0.5 * pp.gamma_in * d * d + pp.beta_in;
}
inline double f_out(double psi, const PhysParams& pp) {
    double d = psi - pp.psi_out;
    return 0.5 * pp.gamma_out * d * d + pp.beta_out;
}

template <typename F>
inline ScalarField map_field(const ScalarField& a, F&& f) {
    ScalarField out(a.grid);
    for (std::size_t p = 0; p < a.size(); ++p) out.v[p] = f(a.v[p]);
    return out;
}

inline ScalarField mobility_field(const ScalarField& phi, double m0) {
    return map_field(phi, [m0](double s) { return mobility_value(s, m0); });
}

// --- energies --------------------------------------------------------------

struct EnergyReport {
    double F_surf = 0.0;
    double F_bend = 0.0;
    double F_area = 0.0;
    double F_osm = 0.0;
    double F_total = 0.0;
    double arc_length = 0.0;  // integral of f_surf; penalized toward a_target
    double E_mod = 0.0;
    double K_n = 0.0;
    double d_sum = 0.0;
};

// integral of f_surf = (3 sqrt(2)/4) [ g(phi)/eps + (eps/2)|grad phi|^2 ]
inline double arc_length_integral(const ScalarField& phi, const PhysParams& pp) {
    ScalarField cgs = center_grad_sq(phi);
    KahanSum acc;
    for (std::size_t p = 0; p < phi.size(); ++p)
        acc.add(double_well(phi.v[p]) / pp.eps + 0.5 * pp.eps * cgs.v[p]);
    double h2 = phi.grid.h * phi.grid.h;
    return 0.75 * kSqrt2 * h2 * acc.value();
}

inline double osmotic_integral(const ScalarField& phi, const ScalarField& psi,
                               const PhysParams& pp) {
    require_same_grid(phi.grid, psi.grid, "osmotic_integral");
    KahanSum acc;
    for (std::size_t p = 0; p < phi.size(); ++p) {
        double w = p_interp(phi.v[p]);
        acc.add(0.5 * (1.0 + w) * f_in(psi.v[p], pp) + 0.5 * (1.0 - w) * f_out(psi.v[p], pp));
    }
    return phi.grid.h * phi.grid.h * acc.value();
}

// Physical energy components. F_bend is evaluated in the integrated-by-parts
// form so that it matches the SAV reconstruction identically.
inline EnergyReport energy_components(const ScalarField& phi, const ScalarField& psi,
                                      const PhysParams& pp) {
    EnergyReport r;
    const double h2 = phi.grid.h * phi.grid.h;
    ScalarField cgs = center_grad_sq(phi);
    ScalarField lap = laplacian(phi);

    r.arc_length = arc_length_integral(phi, pp);
    r.F_surf = pp.gamma_surf * r.arc_length;

    KahanSum bend;
    const double ieps2 = 1.0 / (pp.eps * pp.eps);
    for (std::size_t p = 0; p < phi.size(); ++p) {
        double f = phi.v[p];
        double w = f * (f * f - 1.0);  // phi^3 - phi
        bend.add(w * w * ieps2 + (6.0 * f * f - 2.0) * cgs.v[p] +
                 pp.eps * pp.eps * lap.v[p] * lap.v[p]);
    }
    r.F_bend = pp.gamma_bend * (3.0 * kSqrt2 / (16.0 * pp.eps)) * h2 * bend.value();

    double dev = r.arc_length - pp.a_target;
    r.F_area = 0.5 * pp.gamma_area * dev * dev;
    r.F_osm = osmotic_integral(phi, psi, pp);
    r.F_total = r.F_surf + r.F_bend + r.F_area + r.F_osm;
    return r;
}

// --- SAV initialization -----------------------------------------------------

namespace detail {
inline double checked_sqrt(double radicand, double scale, const char* what) {
    if (radicand < -1e-14 * std::max(scale, 1.0))
        throw std::runtime_error(std::string(what) + ": negative radicand");
    return std::sqrt(std::max(radicand, 0.0));
}
}  // namespace detail

inline double sav_v_value(const ScalarField& phi, const PhysParams& pp) {
    KahanSum acc;
    for (double f : phi.v) {
        double t = f * f - 1.0 - pp.beta_stab;
        acc.add(t * t);
    }
    double h2 = phi.grid.h * phi.grid.h;
    double rad = h2 * acc.value() / (4.0 * pp.eps);
    return detail::checked_sqrt(rad, rad, "sav V");
}

inline double sav_w_value(const ScalarField& phi, const PhysParams& pp) {
    ScalarField cgs = center_grad_sq(phi);
    KahanSum acc;
    const double ieps2 = 1.0 / (pp.eps * pp.eps);
    for (std::size_t p = 0; p < phi.size(); ++p) {
        double f = phi.v[p];
        double w = f * (f * f - 1.0);
        acc.add(6.0 * f * f * cgs.v[p] + w * w * ieps2);
    }
    double rad = phi.grid.h * phi.grid.h * acc.value();
    return detail::checked_sqrt(rad, rad, "sav W");
}

inline double sav_z_value(const ScalarField& phi, const ScalarField& psi, const PhysParams& pp) {
    double rad = 2.0 * osmotic_integral(phi, psi, pp);
    return detail::checked_sqrt(rad, rad, "sav Z");
}

inline SavQuartet sav_init(const ScalarField& phi, const ScalarField& psi, const PhysParams& pp) {
    SavQuartet q;
    q.V = sav_v_value(phi, pp);
    q.W = sav_w_value(phi, pp);
    q.Z = sav_z_value(phi, psi, pp);
    q.U = arc_length_integral(phi, pp) - pp.a_target;
    return q;
}

// --- variational derivative fields -----------------------------------------

// Regularization floor for the SAV denominators; inert at benchmark states,
// prevents 0/0 at degenerate ones (e.g. Q at phi == 0).
inline double denom_floor(const Grid& g) { return 1e-12 * std::sqrt(g.area()); }

struct SavBasis {
    ScalarField S, H, Q, K, P;
    double denom_v = 0.0;   // 2 V(phi)
    double denom_w = 0.0;   // W(phi)
    double denom_z = 0.0;   // 2 Z(phi, psi)
    bool any_floored = false;  // some denominator hit the regularization floor
};

inline ScalarField eval_S(const ScalarField& phi, const PhysParams& pp) {
    double den = std::max(2.0 * sav_v_value(phi, pp), denom_floor(phi.grid));
    ScalarField out(phi.grid);
    for (std::size_t p = 0; p < out.size(); ++p) {
        double f = phi.v[p];
        out.v[p] = f * (f * f - 1.0 - pp.beta_stab) / (pp.eps * den);
    }
    return out;
}

inline ScalarField eval_H(const ScalarField& phi, const PhysParams& pp) {
    ScalarField out = laplacian(phi);
    const double c = 0.75 * kSqrt2;
    for (std::size_t p = 0; p < out.size(); ++p)
        out.v[p] = c * (double_well_prime(phi.v[p]) / pp.eps - pp.eps * out.v[p]);
    return out;
}

inline ScalarField eval_Q(const ScalarField& phi, const PhysParams& pp) {
    double den = std::max(sav_w_value(phi, pp), denom_floor(phi.grid));
    auto [b1, b2] = nonlocal_bending_pair(phi);
    ScalarField out(phi.grid);
    const double ieps2 = 1.0 / (pp.eps * pp.eps);
    for (std::size_t p = 0; p < out.size(); ++p) {
        double f = phi.v[p];
        double cube = f * (f * f - 1.0);
        out.v[p] = (6.0 * (b1.v[p] - b2.v[p]) + ieps2 * cube * (3.0 * f * f - 1.0)) / den;
    }
    return out;
}

inline ScalarField eval_K(const ScalarField& phi, const ScalarField& psi, const PhysParams& pp) {
    double den = std::max(2.0 * sav_z_value(phi, psi, pp), denom_floor(phi.grid));
    ScalarField out(phi.grid);
    for (std::size_t p = 0; p < out.size(); ++p)
        out.v[p] = p_prime(phi.v[p]) * (f_in(psi.v[p], pp) - f_out(psi.v[p], pp)) / den;
    return out;
}

inline ScalarField eval_P(const ScalarField& phi, const ScalarField& psi, const PhysParams& pp) {
    double den = std::max(2.0 * sav_z_value(phi, psi, pp), denom_floor(phi.grid));
    ScalarField out(phi.grid);
    for (std::size_t p = 0; p < out.size(); ++p) {
        double w = p_interp(phi.v[p]);
        out.v[p] = (pp.gamma_in * (1.0 + w) * (psi.v[p] - pp.psi_in) +
                    pp.gamma_out * (1.0 - w) * (psi.v[p] - pp.psi_out)) /
                   den;
    }
    return out;
}

// All five fields from one (phi, psi) pair, sharing the integral work.
inline SavBasis eval_basis(const ScalarField& phi, const ScalarField& psi, const PhysParams& pp) {
    SavBasis b;
    const Grid& g = phi.grid;
    const double floorv = denom_floor(g);
    double dv = 2.0 * sav_v_value(phi, pp);
    double dw = sav_w_value(phi, pp);
    double dz = 2.0 * sav_z_value(phi, psi, pp);
    b.any_floored = dv < floorv || dw < floorv || dz < floorv;
    b.denom_v = std::max(dv, floorv);
    b.denom_w = std::max(dw, floorv);
    b.denom_z = std::max(dz, floorv);

    b.S = ScalarField(g);
    for (std::size_t p = 0; p < phi.size(); ++p) {
        double f = phi.v[p];
        b.S.v[p] = f * (f * f - 1.0 - pp.beta_stab) / (pp.eps * b.denom_v);
    }
    b.H = eval_H(phi, pp);

    auto [b1, b2] = nonlocal_bending_pair(phi);
    b.Q = ScalarField(g);
    const double ieps2 = 1.0 / (pp.eps * pp.eps);
    for (std::size_t p = 0; p < phi.size(); ++p) {
        double f = phi.v[p];
        double cube = f * (f * f - 1.0);
        b.Q.v[p] = (6.0 * (b1.v[p] - b2.v[p]) + ieps2 * cube * (3.0 * f * f - 1.0)) / b.denom_w;
    }

    b.K = ScalarField(g);
    b.P = ScalarField(g);
    for (std::size_t p = 0; p < phi.size(); ++p) {
        double w = p_interp(phi.v[p]);
        double fi = f_in(psi.v[p], pp), fo = f_out(psi.v[p], pp);
        b.K.v[p] = p_prime(phi.v[p]) * (fi - fo) / b.denom_z;
        b.P.v[p] = (pp.gamma_in * (1.0 + w) * (psi.v[p] - pp.psi_in) +
                    pp.gamma_out * (1.0 - w) * (psi.v[p] - pp.psi_out)) /
                   b.denom_z;
    }
    return b;
}

// --- modified discrete energy ledger ----------------------------------------

// E_mod^{n+1,n}: BDF2 history norms of the phase field, the SAV squares,
// the theta/theta_tilde stabilization combination, minus the accumulated
// stabilization sum d_sum = sum_{j>=2} (dt/2) ||d^j||^2.
inline double modified_energy(const ScalarField& phi_np1, const ScalarField& phi_n,
                              const SavQuartet& sav_np1, const SavQuartet& sav_n, double d_sum,
                              const PhysParams& pp) {
    ScalarField lap1 = laplacian(phi_np1);
    ScalarField lap0 = laplacian(phi_n);
    ScalarField lap_ext;
    field_lin(lap_ext, 2.0, lap1, -1.0, lap0);

    FaceFieldPair g1 = grad_faces(phi_np1);
    FaceFieldPair g0 = grad_faces(phi_n);
    FaceFieldPair g_ext(phi_np1.grid), g_diff(phi_np1.grid);
    for (std::size_t p = 0; p < g1.ew.size(); ++p) {
        g_ext.ew[p] = 2.0 * g1.ew[p] - g0.ew[p];
        g_diff.ew[p] = g1.ew[p] - g0.ew[p];
    }
    for (std::size_t p = 0; p < g1.ns.size(); ++p) {
        g_ext.ns[p] = 2.0 * g1.ns[p] - g0.ns[p];
        g_diff.ns[p] = g1.ns[p] - g0.ns[p];
    }

    const double cb = pp.gamma_bend * 3.0 * kSqrt2 * pp.eps / 8.0;
    const double cs = pp.gamma_surf * 3.0 * kSqrt2 * pp.eps / 4.0;
    const double cbeta = pp.gamma_surf * 3.0 * kSqrt2 * pp.beta_stab / (4.0 * pp.eps);
    const double tt = pp.theta_tilde();

    double e = 0.0;
    e += 0.5 * cb * (inner(lap1, lap1) + inner(lap_ext, lap_ext));
    double a_grad = face_inner(g1, g1) + face_inner(g_ext, g_ext);
    e += 0.5 * (cs + pp.theta) * a_grad;
    e -= 0.5 * tt * (a_grad - 2.0 * face_inner(g_diff, g_diff));
    if (cbeta != 0.0) {
        ScalarField ext;
        field_lin(ext, 2.0, phi_np1, -1.0, phi_n);
        e += 0.5 * cbeta * (inner(phi_np1, phi_np1) + inner(ext, ext));
    }
    auto sq = [](double a) { return a * a; };
    e += 0.5 * pp.gamma_surf * 1.5 * kSqrt2 * (sq(sav_np1.V) + sq(2.0 * sav_np1.V - sav_n.V));
    e += 0.5 * pp.gamma_area * (sq(sav_np1.U) + sq(2.0 * sav_np1.U - sav_n.U));
    e += 0.5 * pp.gamma_bend * (3.0 * kSqrt2 / (8.0 * pp.eps)) *
         (sq(sav_np1.W) + sq(2.0 * sav_np1.W - sav_n.W));
    e += 0.5 * (sq(sav_np1.Z) + sq(2.0 * sav_np1.Z - sav_n.Z));
    e -= d_sum;
    return e;
}

// At coincident time levels the two-level energy is exactly twice the
// continuous modified energy, which itself equals the physical total plus
// a beta-dependent constant. Exposed for the SAV-consistency checks.
inline double beta_energy_constant(const Grid& g, const PhysParams& pp) {
    return pp.gamma_surf * (3.0 * kSqrt2 / (16.0 * pp.eps)) *
           (pp.beta_stab * pp.beta_stab + 2.0 * pp.beta_stab) * g.area();
}

// K^n: the non-negative BDF2 second-difference dissipation of every
// variable not scaled by lambda.
inline double bdf2_dissipation(const ScalarField& phi_np1, const ScalarField& phi_n,
                               const ScalarField& phi_nm1, const SavQuartet& s_np1,
                               const SavQuartet& s_n, const SavQuartet& s_nm1,
                               const PhysParams& pp) {
    ScalarField d2;
    field_lin(d2, 1.0, phi_np1, -2.0, phi_n);
    field_axpy(d2, 1.0, phi_nm1);

    ScalarField lapd = laplacian(d2);
    double gn = grad_norm_sq(d2);

    const double cb = pp.gamma_bend * 3.0 * kSqrt2 * pp.eps / 8.0;
    const double cs = pp.gamma_surf * 3.0 * kSqrt2 * pp.eps / 4.0;
    const double cbeta = pp.gamma_surf * 3.0 * kSqrt2 * pp.beta_stab / (4.0 * pp.eps);

    auto sq = [](double a) { return a * a; };
    double k = 0.0;
    k += 0.5 * cb * inner(lapd, lapd);
    k += 0.5 * (cs + pp.theta) * gn;
    k += 1.5 * pp.theta_tilde() * gn;
    k += 0.5 * cbeta * inner(d2, d2);
    k += 0.5 * pp.gamma_surf * 1.5 * kSqrt2 * sq(s_np1.V - 2.0 * s_n.V + s_nm1.V);
    k += 0.5 * pp.gamma_area * sq(s_np1.U - 2.0 * s_n.U + s_nm1.U);
    k += 0.5 * pp.gamma_bend * (3.0 * kSqrt2 / (8.0 * pp.eps)) *
         sq(s_np1.W - 2.0 * s_n.W + s_nm1.W);
    k += 0.5 * sq(s_np1.Z - 2.0 * s_n.Z + s_nm1.Z);
    return k;
}

}  // namespace vcc
