// studies.hpp
// Convergence harnesses (temporal Cauchy, spatial refinement, coupled
// refinement path) and the CC-vs-classical solver cost benchmark. Member
// runs are deterministic and executed sequentially.

#pragma once

#include <map>

#include "vesiclecc/runner.hpp"

namespace vcc {

namespace detail {

struct FinalFields {
    ScalarField phi, psi;
};

inline FinalFields run_to_final(RunConfig cfg, std::ostream* log) {
    cfg.steps = 0;  // derive from t_final
    RunOptions opt;
    opt.write_artifacts = false;
    opt.track_energy = false;
    opt.log = log;
    RunResult r = run_simulation(cfg, opt);
    return {std::move(r.state.phi_n), std::move(r.state.psi_n)};
}

}  // namespace detail

// Cauchy temporal study: for each dt in the halving list, compare the final
// fields of runs at dt and dt/2 on one fixed grid.
inline ConvergenceReport temporal_cauchy_study(const RunConfig& base,
                                               const std::vector<double>& dt_list,
                                               std::ostream* log = nullptr) {
    std::map<double, detail::FinalFields> cache;
    auto solution_at = [&](double dt) -> const detail::FinalFields& {
        auto it = cache.find(dt);
        if (it != cache.end()) return it->second;
        RunConfig cfg = base;
        cfg.dt = dt;
        if (log) *log << "temporal study: running dt = " << dt << "\n";
        return cache.emplace(dt, detail::run_to_final(cfg, nullptr)).first->second;
    };
    ConvergenceReport rep;
    for (double dt : dt_list) {
        const auto& coarse = solution_at(dt);
        const auto& fine = solution_at(0.5 * dt);
        ConvergenceLevel lv;
        lv.param = dt;
        lv.err_phi = compare_fields(coarse.phi, fine.phi).l2;
        lv.err_psi = compare_fields(coarse.psi, fine.psi).l2;
        lv.err_comb = std::sqrt(lv.err_phi * lv.err_phi + lv.err_psi * lv.err_psi);
        rep.levels.push_back(lv);
        if (log)
            *log << "  dt=" << dt << " err_phi=" << lv.err_phi << " err_psi=" << lv.err_psi
                 << "\n";
    }
    rep.compute_rates();
    return rep;
}

inline std::vector<double> halving_dt_list(double dt0, int levels) {
    std::vector<double> out;
    for (int i = 0; i < levels; ++i) out.push_back(dt0 / double(1 << i));
    return out;
}

// Spatial study at fixed dt: errors between consecutive grids via bicubic
// restriction of the finer solution to the coarser cell centers.
inline ConvergenceReport spatial_study(const RunConfig& base, const std::vector<int>& n_list,
                                       double dt_fixed, std::ostream* log = nullptr) {
    std::vector<detail::FinalFields> finals;
    for (int n : n_list) {
        RunConfig cfg = base;
        cfg.n = n;
        cfg.dt = dt_fixed;
        if (log) *log << "spatial study: running N = " << n << "\n";
        finals.push_back(detail::run_to_final(cfg, nullptr));
    }
    ConvergenceReport rep;
    for (std::size_t i = 0; i + 1 < finals.size(); ++i) {
        if (n_list[i + 1] != 2 * n_list[i])
            throw std::invalid_argument("spatial_study: N list must double at each level");
        const Grid& gc = finals[i].phi.grid;
        ScalarField phi_r = bicubic_restrict(finals[i + 1].phi, gc);
        ScalarField psi_r = bicubic_restrict(finals[i + 1].psi, gc);
        ConvergenceLevel lv;
        lv.param = n_list[i];
        lv.err_phi = compare_fields(finals[i].phi, phi_r).l2;
        lv.err_psi = compare_fields(finals[i].psi, psi_r).l2;
        lv.err_comb = std::sqrt(lv.err_phi * lv.err_phi + lv.err_psi * lv.err_psi);
        rep.levels.push_back(lv);
        if (log)
            *log << "  N=" << n_list[i] << " err_phi=" << lv.err_phi << " err_psi=" << lv.err_psi
                 << "\n";
    }
    rep.compute_rates();
    return rep;
}

// Coupled refinement path: N doubles from n0 to n_max with dt = C h.
inline ConvergenceReport refinement_path_study(const RunConfig& base, int n0, int n_max, double C,
                                               std::ostream* log = nullptr) {
    std::vector<int> n_list;
    for (int n = n0; n <= n_max; n *= 2) n_list.push_back(n);
    std::vector<detail::FinalFields> finals;
    for (int n : n_list) {
        RunConfig cfg = base;
        cfg.n = n;
        cfg.dt = C * cfg.domain_size / n;
        if (log) *log << "refinement study: N = " << n << " dt = " << cfg.dt << "\n";
        finals.push_back(detail::run_to_final(cfg, nullptr));
    }
    ConvergenceReport rep;
    for (std::size_t i = 0; i + 1 < finals.size(); ++i) {
        const Grid& gc = finals[i].phi.grid;
        ScalarField phi_r = bicubic_restrict(finals[i + 1].phi, gc);
        ScalarField psi_r = bicubic_restrict(finals[i + 1].psi, gc);
        ConvergenceLevel lv;
        lv.param = n_list[i];
        lv.err_phi = compare_fields(finals[i].phi, phi_r).l2;
        lv.err_psi = compare_fields(finals[i].psi, psi_r).l2;
        lv.err_comb = std::sqrt(lv.err_phi * lv.err_phi + lv.err_psi * lv.err_psi);
        rep.levels.push_back(lv);
        if (log) *log << "  N=" << n_list[i] << " err_comb=" << lv.err_comb << "\n";
    }
    rep.compute_rates();
    return rep;
}

inline void write_convergence_csv(const std::filesystem::path& path, const ConvergenceReport& rep,
                                  const char* param_name) {
    std::ofstream out(path);
    out << param_name << ",err_phi,rate_phi,err_psi,rate_psi,err_comb,rate_comb\n";
    for (std::size_t i = 0; i < rep.levels.size(); ++i) {
        char buf[512];
        if (i == 0)
            std::snprintf(buf, sizeof(buf), "%.17g,%.17g,,%.17g,,%.17g,", rep.levels[i].param,
                          rep.levels[i].err_phi, rep.levels[i].err_psi, rep.levels[i].err_comb);
        else
            std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.6g,%.17g,%.6g,%.17g,%.6g",
                          rep.levels[i].param, rep.levels[i].err_phi, rep.rate_phi[i - 1],
                          rep.levels[i].err_psi, rep.rate_psi[i - 1], rep.levels[i].err_comb,
                          rep.rate_comb[i - 1]);
        out << buf << "\n";
    }
}

// --- solver-cost benchmark ---------------------------------------------------

struct BenchRow {
    int n = 0;
    std::string scheme;
    long steps = 0;
    double total_seconds = 0;
    double ac_solve_seconds = 0;
    double ch_solve_seconds = 0;
    double ch_per_step = 0;
    double ch_fraction = 0;
    double pcg_iters_per_solve = 0;
    int pcg_iters_min = 0;
    int pcg_iters_max = 0;
};

// Fixed-step-count timing runs of the growth benchmark for each grid size
// and scheme. CC rows report zero PCG iterations by construction.
inline std::vector<BenchRow> run_benchmark(const RunConfig& base, const std::vector<int>& n_list,
                                           const std::vector<std::string>& schemes, long steps,
                                           std::ostream* log = nullptr) {
    std::vector<BenchRow> rows;
    for (int n : n_list) {
        for (const auto& s : schemes) {
            RunConfig cfg = base;
            cfg.n = n;
            cfg.steps = steps;
            cfg.scheme = (s == "classical") ? Scheme::classical_bdf2 : Scheme::cc_bdf2;
            if (log) *log << "benchmark: N = " << n << " scheme = " << s << "\n";
            RunOptions opt;
            opt.write_artifacts = false;
            opt.track_energy = false;
            RunResult r = run_simulation(cfg, opt);
            BenchRow row;
            row.n = n;
            row.scheme = s;
            row.steps = steps;
            row.total_seconds = r.total_seconds;
            row.ac_solve_seconds = r.ac_solve_seconds;
            row.ch_solve_seconds = r.ch_solve_seconds;
            row.ch_per_step = r.ch_solve_seconds / double(steps);
            row.ch_fraction = r.ch_solve_seconds / std::max(r.total_seconds, 1e-300);
            if (r.pcg_solves > 0) {
                row.pcg_iters_per_solve = double(r.pcg_iters_total) / double(r.pcg_solves);
                row.pcg_iters_min = r.pcg_iters_min;
                row.pcg_iters_max = r.pcg_iters_max;
            }
            rows.push_back(row);
            if (log)
                *log << "  total=" << row.total_seconds << "s ch/step=" << row.ch_per_step
                     << "s iters/solve=" << row.pcg_iters_per_solve << "\n";
        }
    }
    return rows;
}

inline void write_benchmark_csv(const std::filesystem::path& dir,
                                const std::vector<BenchRow>& rows) {
    std::ofstream out(dir / "bench.csv");
    out << "n,scheme,steps,total_seconds,ac_solve_seconds,ch_solve_seconds,ch_per_step,"
           "ch_fraction,pcg_iters_per_solve,pcg_iters_min,pcg_iters_max\n";
    for (const auto& r : rows) {
        char buf[512];
        std::snprintf(buf, sizeof(buf), "%d,%s,%ld,%.6g,%.6g,%.6g,%.6g,%.6g,%.6g,%d,%d", r.n,
                      r.scheme.c_str(), r.steps, r.total_seconds, r.ac_solve_seconds,
                      r.ch_solve_seconds, r.ch_per_step, r.ch_fraction, r.pcg_iters_per_solve,
                      r.pcg_iters_min, r.pcg_iters_max);
        out << buf << "\n";
    }
    // per-N speedups when both schemes are present
    std::ofstream sum(dir / "bench_summary.csv");
    sum << "n,total_speedup,ch_speedup\n";
    for (const auto& cc : rows) {
        if (cc.scheme != "cc") continue;
        for (const auto& cl : rows) {
            if (cl.scheme == "classical" && cl.n == cc.n) {
                char buf[256];
                std::snprintf(buf, sizeof(buf), "%d,%.6g,%.6g", cc.n,
                              cl.total_seconds / std::max(cc.total_seconds, 1e-300),
                              cl.ch_solve_seconds / std::max(cc.ch_solve_seconds, 1e-300));
                sum << buf << "\n";
            }
        }
    }
}

}  // namespace vcc
