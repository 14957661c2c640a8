// field.hpp
// Cell-centered and face-centered fields on a uniform rectangular grid,
// plus the discrete inner products used throughout the solver.

#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace vcc {

inline constexpr double kSqrt2 = std::numbers::sqrt2;

// Uniform m x n cell-centered grid with spacing h, domain (0, m*h) x (0, n*h).
// Cell centers sit at ((i+1/2)h, (j+1/2)h) for i=0..m-1, j=0..n-1.
struct Grid {
    int m = 0;
    int n = 0;
    double h = 0.0;

    Grid() = default;
    Grid(int m_, int n_, double h_) : m(m_), n(n_), h(h_) {
        if (m < 4 || n < 4 || h <= 0.0)
            throw std::invalid_argument("Grid: need m,n >= 4 and h > 0");
    }

    double lx() const { return m * h; }
    double ly() const { return n * h; }
    double area() const { return lx() * ly(); }
    std::size_t cells() const { return std::size_t(m) * std::size_t(n); }
    double xc(int i) const { return (i + 0.5) * h; }
    double yc(int j) const { return (j + 0.5) * h; }

    bool operator==(const Grid& o) const { return m == o.m && n == o.n && h == o.h; }
    bool operator!=(const Grid& o) const { return !(*this == o); }
};

// Compensated (Kahan) accumulator. All reductions in the solver use it so
// that energy differences and mass sums stay at roundoff across ~1e6 cells.
struct KahanSum {
    double s = 0.0;
    double c = 0.0;
    void add(double x) {
        double y = x - c;
        double t = s + y;
        c = (t - s) - y;
        s = t;
    }
    double value() const { return s; }
};

// Cell-centered scalar field. Storage is row-major with x fastest:
// v[j*m + i] holds the value at cell (i, j).
struct ScalarField {
    Grid grid;
    std::vector<double> v;

    ScalarField() = default;
    explicit ScalarField(const Grid& g, double fill = 0.0) : grid(g), v(g.cells(), fill) {}

    double& operator()(int i, int j) { return v[std::size_t(j) * grid.m + i]; }
    double operator()(int i, int j) const { return v[std::size_t(j) * grid.m + i]; }

    double* data() { return v.data(); }
    const double* data() const { return v.data(); }
    std::size_t size() const { return v.size(); }

    bool finite() const {
        for (double x : v)
            if (!std::isfinite(x)) return false;
        return true;
    }
};

// Pair of face-centered arrays: ew on east-west faces ((m+1) x n, x-index
// fastest), ns on north-south faces (m x (n+1)). For derivative-type fields
// under homogeneous Neumann conditions the boundary-normal entries are zero.
struct FaceFieldPair {
    Grid grid;
    std::vector<double> ew;  // ew[j*(m+1) + k], k = 0..m
    std::vector<double> ns;  // ns[j*m + i],     j = 0..n

    FaceFieldPair() = default;
    explicit FaceFieldPair(const Grid& g, double fill = 0.0)
        : grid(g),
          ew(std::size_t(g.m + 1) * g.n, fill),
          ns(std::size_t(g.m) * (g.n + 1), fill) {}

    double& e(int k, int j) { return ew[std::size_t(j) * (grid.m + 1) + k]; }
    double e(int k, int j) const { return ew[std::size_t(j) * (grid.m + 1) + k]; }
    double& s(int i, int j) { return ns[std::size_t(j) * grid.m + i]; }
    double s(int i, int j) const { return ns[std::size_t(j) * grid.m + i]; }
};

inline void require_same_grid(const Grid& a, const Grid& b, const char* what) {
    if (a != b) throw std::invalid_argument(std::string(what) + ": grid mismatch");
}

// (phi, psi)_h = h^2 sum phi_ij psi_ij
inline double inner(const ScalarField& a, const ScalarField& b) {
    require_same_grid(a.grid, b.grid, "inner");
    KahanSum acc;
    for (std::size_t p = 0; p < a.size(); ++p) acc.add(a.v[p] * b.v[p]);
    return a.grid.h * a.grid.h * acc.value();
}

inline double field_sum(const ScalarField& a) {
    KahanSum acc;
    for (double x : a.v) acc.add(x);
    return acc.value();
}

// h^2 sum of the field; the discrete mass when a is a conserved density.
inline double mass(const ScalarField& a) { return a.grid.h * a.grid.h * field_sum(a); }

inline double mean(const ScalarField& a) { return field_sum(a) / double(a.grid.cells()); }

// Edge-weighted face inner product: [f,g]_ew + [f,g]_ns. Each face value is
// shared by the two adjacent cells with weight 1/2, so interior faces carry
// full h^2 weight and boundary faces half.
inline double face_inner(const FaceFieldPair& f, const FaceFieldPair& g) {
    require_same_grid(f.grid, g.grid, "face_inner");
    const int m = f.grid.m, n = f.grid.n;
    KahanSum acc;
    for (int j = 0; j < n; ++j)
        for (int k = 0; k <= m; ++k) {
            double w = (k == 0 || k == m) ? 0.5 : 1.0;
            acc.add(w * f.e(k, j) * g.e(k, j));
        }
    for (int j = 0; j <= n; ++j) {
        double w = (j == 0 || j == n) ? 0.5 : 1.0;
        for (int i = 0; i < m; ++i) acc.add(w * f.s(i, j) * g.s(i, j));
    }
    return f.grid.h * f.grid.h * acc.value();
}

inline double linf_norm(const ScalarField& a) {
    double r = 0.0;
    for (double x : a.v) r = std::max(r, std::abs(x));
    return r;
}

inline double l2_norm(const ScalarField& a) { return std::sqrt(inner(a, a)); }

// out = alpha*a + beta*b
inline void field_lin(ScalarField& out, double alpha, const ScalarField& a, double beta,
                      const ScalarField& b) {
    require_same_grid(a.grid, b.grid, "field_lin");
    if (out.grid != a.grid) out = ScalarField(a.grid);
    for (std::size_t p = 0; p < out.size(); ++p) out.v[p] = alpha * a.v[p] + beta * b.v[p];
}

inline void field_scale(ScalarField& a, double alpha) {
    for (double& x : a.v) x *= alpha;
}

inline void field_axpy(ScalarField& y, double alpha, const ScalarField& x) {
    require_same_grid(x.grid, y.grid, "field_axpy");
    for (std::size_t p = 0; p < y.size(); ++p) y.v[p] += alpha * x.v[p];
}

}  // namespace vcc
