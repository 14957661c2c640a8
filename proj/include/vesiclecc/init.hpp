// init.hpp
// Initial phase fields: a smooth tanh ellipse, sharp indicator shapes
// (triangle, star, incomplete hexagon, crescent), Cahn-Hilliard smoothing
// of sharp profiles, and the linear concentration profiles.

#pragma once

#include <algorithm>

#include "vesiclecc/spectral.hpp"

namespace vcc {

enum class ShapeKind { ellipse, triangle, star, hexagon_incomplete, crescent };

inline ShapeKind shape_from_name(const std::string& s) {
    if (s == "ellipse") return ShapeKind::ellipse;
    if (s == "triangle") return ShapeKind::triangle;
    if (s == "star") return ShapeKind::star;
    if (s == "hexagon_incomplete") return ShapeKind::hexagon_incomplete;
    if (s == "crescent") return ShapeKind::crescent;
    throw std::invalid_argument("unknown shape: " + s);
}

inline std::string shape_name(ShapeKind k) {
    switch (k) {
        case ShapeKind::ellipse: return "ellipse";
        case ShapeKind::triangle: return "triangle";
        case ShapeKind::star: return "star";
        case ShapeKind::hexagon_incomplete: return "hexagon_incomplete";
        case ShapeKind::crescent: return "crescent";
    }
    return "?";
}

struct ShapeSpec {
    ShapeKind kind = ShapeKind::ellipse;
    double cx = 1.0, cy = 1.0;
    double rotation = 0.0;
    // ellipse
    double a = 0.5, b = 0.25;
    // triangle (equilateral), edge length
    double triangle_edge = 1.0;
    // star: r(t) = r0 (1 + amp cos(points * t))
    double star_r0 = 0.45;
    int star_points = 5;
    double star_amp = 0.4;
    // incomplete hexagon: circumradius = edge, minus one 60-degree sector
    double hexagon_edge = 0.55;
    // crescent: outer disc minus inner disc offset by 0.5*r_outer along +x
    double crescent_r_outer = 0.5;
    double crescent_r_inner = 0.4;

    // largest distance from the center the shape can reach
    double extent() const {
        switch (kind) {
            case ShapeKind::ellipse: return std::max(a, b);
            case ShapeKind::triangle: return triangle_edge / std::sqrt(3.0);
            case ShapeKind::star: return star_r0 * (1.0 + std::abs(star_amp));
            case ShapeKind::hexagon_incomplete: return hexagon_edge;
            case ShapeKind::crescent: return crescent_r_outer;
        }
        return 0.0;
    }
};

namespace detail {

inline bool point_in_polygon(double x, double y, const std::vector<std::pair<double, double>>& v) {
    bool in = false;
    std::size_t nv = v.size();
    for (std::size_t i = 0, j = nv - 1; i < nv; j = i++) {
        auto [xi, yi] = v[i];
        auto [xj, yj] = v[j];
        if ((yi > y) != (yj > y) && x < (xj - xi) * (y - yi) / (yj - yi) + xi) in = !in;
    }
    return in;
}

inline bool inside_shape(const ShapeSpec& s, double x, double y) {
    // rotate into the shape frame
    double dx = x - s.cx, dy = y - s.cy;
    double c = std::cos(-s.rotation), sn = std::sin(-s.rotation);
    double u = c * dx - sn * dy;
    double w = sn * dx + c * dy;
    switch (s.kind) {
        case ShapeKind::ellipse:
            return (u / s.a) * (u / s.a) + (w / s.b) * (w / s.b) <= 1.0;
        case ShapeKind::triangle: {
            double R = s.triangle_edge / std::sqrt(3.0);
            std::vector<std::pair<double, double>> v;
            for (int k = 0; k < 3; ++k) {
                double t = std::numbers::pi / 2.0 + 2.0 * std::numbers::pi * k / 3.0;
                v.emplace_back(R * std::cos(t), R * std::sin(t));
            }
            return point_in_polygon(u, w, v);
        }
        case ShapeKind::star: {
            double r = std::hypot(u, w);
            double t = std::atan2(w, u);
            return r <= s.star_r0 * (1.0 + s.star_amp * std::cos(s.star_points * t));
        }
        case ShapeKind::hexagon_incomplete: {
            std::vector<std::pair<double, double>> v;
            for (int k = 0; k < 6; ++k) {
                double t = 2.0 * std::numbers::pi * k / 6.0;
                v.emplace_back(s.hexagon_edge * std::cos(t), s.hexagon_edge * std::sin(t));
            }
            if (!point_in_polygon(u, w, v)) return false;
            double t = std::atan2(w, u);
            // remove the sector straddling the +x axis
            return !(t > -std::numbers::pi / 6.0 && t < std::numbers::pi / 6.0);
        }
        case ShapeKind::crescent: {
            double off = 0.5 * s.crescent_r_outer;
            bool in_outer = u * u + w * w <= s.crescent_r_outer * s.crescent_r_outer;
            double du = u - off;
            bool in_inner = du * du + w * w <= s.crescent_r_inner * s.crescent_r_inner;
            return in_outer && !in_inner;
        }
    }
    return false;
}

}  // namespace detail

inline void require_inside_domain(const ShapeSpec& s, const Grid& g, double eps) {
    double margin = 4.0 * eps;
    double ext = s.extent();
    if (s.cx - ext < margin || s.cy - ext < margin || s.cx + ext > g.lx() - margin ||
        s.cy + ext > g.ly() - margin)
        throw std::invalid_argument("shape does not fit inside the domain with margin 4*eps");
}

// +1 inside the shape, -1 outside.
inline ScalarField sharp_indicator(const ShapeSpec& s, const Grid& g) {
    ScalarField phi(g);
    for (int j = 0; j < g.n; ++j)
        for (int i = 0; i < g.m; ++i)
            phi(i, j) = detail::inside_shape(s, g.xc(i), g.yc(j)) ? 1.0 : -1.0;
    return phi;
}

// Smooth diffuse ellipse: phi = tanh(d / (sqrt(2) eps)) with the signed
// pseudo-distance d = min(a,b) * (1 - sqrt((u/a)^2 + (w/b)^2)). Positive
// inside; reduces to the exact radial distance for a = b.
inline ScalarField tanh_ellipse(const ShapeSpec& s, const Grid& g, double eps) {
    ScalarField phi(g);
    double scale = std::min(s.a, s.b);
    double c = std::cos(-s.rotation), sn = std::sin(-s.rotation);
    for (int j = 0; j < g.n; ++j)
        for (int i = 0; i < g.m; ++i) {
            double dx = g.xc(i) - s.cx, dy = g.yc(j) - s.cy;
            double u = c * dx - sn * dy;
            double w = sn * dx + c * dy;
            double r = std::sqrt((u / s.a) * (u / s.a) + (w / s.b) * (w / s.b));
            phi(i, j) = std::tanh(scale * (1.0 - r) / (kSqrt2 * eps));
        }
    return phi;
}

struct SmoothingOptions {
    double mobility = 0.01;
    double dt = 1e-6;
    double t_final = 1e-5;
    int steps() const { return std::max(1, int(std::lround(t_final / dt))); }
};

// Relax a sharp +/-1 profile with the constant-mobility Cahn-Hilliard
// equation: explicit (M/eps) Lap(phi^3 - phi), implicit biharmonic, then a
// final clamp into [-1, 1]. Mass is conserved to roundoff before the clamp.
inline ScalarField smooth_ic(const ScalarField& phi_sharp, double eps,
                             const SmoothingOptions& opt = {}, bool clamp = true) {
    const Grid& g = phi_sharp.grid;
    EigTable eig(g);
    Dct2 plan(g.m, g.n, 1);
    ScalarField phi = phi_sharp;
    ScalarField cube(g), rhs(g);
    const int nsteps = opt.steps();
    for (int s = 0; s < nsteps; ++s) {
        for (std::size_t q = 0; q < cube.size(); ++q) {
            double f = phi.v[q];
            cube.v[q] = f * f * f - f;
        }
        laplacian_into(rhs, cube);
        for (std::size_t q = 0; q < rhs.size(); ++q)
            rhs.v[q] = phi.v[q] / opt.dt + (opt.mobility / eps) * rhs.v[q];
        solve_smoothing_ch(plan, eig, opt.mobility, eps, opt.dt, rhs);
        phi = rhs;
        if (!phi.finite()) throw std::runtime_error("smooth_ic: non-finite field");
    }
    if (clamp)
        for (double& x : phi.v) x = std::clamp(x, -1.0, 1.0);
    return phi;
}

// psi0 = a * phi0 + b. Growth profile: (-0.35, 0.45); shrinkage: (-0.1, 0.7).
inline ScalarField psi_from_phi(const ScalarField& phi0, double a, double b) {
    ScalarField out(phi0.grid);
    for (std::size_t q = 0; q < out.size(); ++q) out.v[q] = a * phi0.v[q] + b;
    return out;
}

}  // namespace vcc
