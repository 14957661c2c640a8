// dct.hpp
// Orthonormal 2D type-II/type-III cosine transforms over batches of
// cell-centered fields, backed by FFTW r2r plans. The normalization is
// chosen so the transform matrix is orthogonal (Parseval holds exactly),
// which makes the Neumann Laplacian diagonal with eigenvalues
// lambda_ij = -(4/h^2)[sin^2(pi i / 2m) + sin^2(pi j / 2n)].

#pragma once

#include <fftw3.h>

#include <cstdlib>
#include <cstring>
#include <mutex>
#include <span>
#include <vector>

#include "vesiclecc/field.hpp"

namespace vcc {

namespace detail {
inline std::mutex& fftw_mutex() {
    static std::mutex mu;
    return mu;
}

// VESICLECC_THREADS caps the transform parallelism. Default is one thread,
// which keeps runs bit-reproducible across machines regardless of core
// count; a fixed value is reproducible too since it selects a fixed plan.
inline int transform_threads() {
    static int n = [] {
        const char* env = std::getenv("VESICLECC_THREADS");
        if (!env) return 1;
        int v = std::atoi(env);
        return v < 1 ? 1 : v;
    }();
    return n;
}

#ifdef VESICLECC_FFTW_THREADS
inline void init_fftw_threads() {
    static bool done = [] {
        fftw_init_threads();
        return true;
    }();
    (void)done;
}
#endif
}  // namespace detail

// Batched 2D DCT for one grid size. Owns FFTW plans and an aligned work
// buffer large enough for `batch` fields; immutable after construction and
// safe to share across const uses, but execute() mutates the buffer, so a
// plan instance must not be used from two threads at once.
class Dct2 {
  public:
    Dct2(int m, int n, int batch) : m_(m), n_(n), batch_(batch) {
        const std::size_t total = std::size_t(m) * n * batch;
        buf_ = static_cast<double*>(fftw_malloc(sizeof(double) * total));
        int dims[2] = {n_, m_};  // row-major: n slowest, m fastest
        fftw_r2r_kind fwd[2] = {FFTW_REDFT10, FFTW_REDFT10};
        fftw_r2r_kind inv[2] = {FFTW_REDFT01, FFTW_REDFT01};
        {
            // FFTW planning is not thread-safe.
            std::lock_guard<std::mutex> lk(detail::fftw_mutex());
#ifdef VESICLECC_FFTW_THREADS
            detail::init_fftw_threads();
            fftw_plan_with_nthreads(detail::transform_threads());
#endif
            plan_fwd_ = fftw_plan_many_r2r(2, dims, batch_, buf_, nullptr, 1, m_ * n_, buf_,
                                           nullptr, 1, m_ * n_, fwd, FFTW_ESTIMATE);
            plan_inv_ = fftw_plan_many_r2r(2, dims, batch_, buf_, nullptr, 1, m_ * n_, buf_,
                                           nullptr, 1, m_ * n_, inv, FFTW_ESTIMATE);
        }
        // Per-mode scale factors: s(0) = sqrt(1/N), s(k) = sqrt(2/N).
        sx_fwd_.resize(m_);
        sy_fwd_.resize(n_);
        sx_inv_.resize(m_);
        sy_inv_.resize(n_);
        for (int k = 0; k < m_; ++k) {
            double s = (k == 0) ? std::sqrt(1.0 / m_) : std::sqrt(2.0 / m_);
            sx_fwd_[k] = 0.5 * s;                 // REDFT10 emits 2*sum(x cos)
            sx_inv_[k] = (k == 0) ? s : 0.5 * s;  // REDFT01 doubles k>0 terms
        }
        for (int k = 0; k < n_; ++k) {
            double s = (k == 0) ? std::sqrt(1.0 / n_) : std::sqrt(2.0 / n_);
            sy_fwd_[k] = 0.5 * s;
            sy_inv_[k] = (k == 0) ? s : 0.5 * s;
        }
    }

    ~Dct2() {
        std::lock_guard<std::mutex> lk(detail::fftw_mutex());
        fftw_destroy_plan(plan_fwd_);
        fftw_destroy_plan(plan_inv_);
        fftw_free(buf_);
    }

    Dct2(const Dct2&) = delete;
    Dct2& operator=(const Dct2&) = delete;

    int m() const { return m_; }
    int n() const { return n_; }
    int batch() const { return batch_; }
    std::size_t field_size() const { return std::size_t(m_) * n_; }

    // slot b of the work buffer (coefficients or samples, depending on stage)
    double* slot(int b) { return buf_ + std::size_t(b) * field_size(); }
    const double* slot(int b) const { return buf_ + std::size_t(b) * field_size(); }

    // In-place orthonormal forward transform of the first `count` slots.
    void forward(int count) {
        fftw_execute(plan_fwd_);
        scale(count, sx_fwd_, sy_fwd_);
    }

    // In-place orthonormal inverse transform of the first `count` slots.
    // Pre-scales coefficients, then runs REDFT01 (which needs no post scale).
    void inverse(int count) {
        scale(count, sx_inv_, sy_inv_);
        fftw_execute(plan_inv_);
    }

  private:
    void scale(int count, const std::vector<double>& sx, const std::vector<double>& sy) {
        for (int b = 0; b < count; ++b) {
            double* p = slot(b);
            for (int j = 0; j < n_; ++j) {
                const double wy = sy[j];
                double* row = p + std::size_t(j) * m_;
                for (int i = 0; i < m_; ++i) row[i] *= wy * sx[i];
            }
        }
        // Slots beyond `count` hold stale data; zero them so the batched
        // plan transforms well-defined values.
        for (int b = count; b < batch_; ++b) std::memset(slot(b), 0, sizeof(double) * field_size());
    }

    int m_, n_, batch_;
    double* buf_ = nullptr;
    fftw_plan plan_fwd_ = nullptr;
    fftw_plan plan_inv_ = nullptr;
    std::vector<double> sx_fwd_, sy_fwd_, sx_inv_, sy_inv_;
};

// Convenience batch API over ScalarFields (one forward pass, coefficient
// arrays out). All fields must live on one grid.
inline std::vector<std::vector<double>> dct2_forward(Dct2& plan,
                                                     std::span<const ScalarField* const> fields) {
    if (fields.empty()) return {};
    const Grid& g = fields[0]->grid;
    if (int(fields.size()) > plan.batch()) throw std::invalid_argument("dct2_forward: batch too large");
    for (auto* f : fields) require_same_grid(f->grid, g, "dct2_forward");
    if (g.m != plan.m() || g.n != plan.n()) throw std::invalid_argument("dct2_forward: plan size");
    for (std::size_t b = 0; b < fields.size(); ++b)
        std::memcpy(plan.slot(int(b)), fields[b]->data(), sizeof(double) * plan.field_size());
    plan.forward(int(fields.size()));
    std::vector<std::vector<double>> out(fields.size());
    for (std::size_t b = 0; b < fields.size(); ++b)
        out[b].assign(plan.slot(int(b)), plan.slot(int(b)) + plan.field_size());
    return out;
}

inline std::vector<ScalarField> dct2_inverse(Dct2& plan, const Grid& g,
                                             std::span<const std::vector<double>> coeffs) {
    if (int(coeffs.size()) > plan.batch()) throw std::invalid_argument("dct2_inverse: batch too large");
    for (std::size_t b = 0; b < coeffs.size(); ++b)
        std::memcpy(plan.slot(int(b)), coeffs[b].data(), sizeof(double) * plan.field_size());
    plan.inverse(int(coeffs.size()));
    std::vector<ScalarField> out;
    out.reserve(coeffs.size());
    for (std::size_t b = 0; b < coeffs.size(); ++b) {
        ScalarField f(g);
        std::memcpy(f.data(), plan.slot(int(b)), sizeof(double) * plan.field_size());
        out.push_back(std::move(f));
    }
    return out;
}

}  // namespace vcc
