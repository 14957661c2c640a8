// runner.hpp
// Drives one simulation from a RunConfig: builds the initial data, advances
// the stepper, records the time series, and writes artifacts (CSV series,
// field snapshots, heatmaps, per-stage timings, resolved config).

#pragma once

#include "vesiclecc/config.hpp"
#include "vesiclecc/io.hpp"
#include "vesiclecc/stepper.hpp"

namespace vcc {

struct InitialData {
    ScalarField phi0, psi0;
    PhysParams phys;  // with a_target resolved
};

inline ScalarField build_phi0(const RunConfig& c) {
    Grid g = c.make_grid();
    require_inside_domain(c.shape, g, c.phys.eps);
    if (c.shape.kind == ShapeKind::ellipse) return tanh_ellipse(c.shape, g, c.phys.eps);
    ScalarField sharp = sharp_indicator(c.shape, g);
    return smooth_ic(sharp, c.phys.eps, c.smoothing);
}

inline InitialData build_initial_data(const RunConfig& c) {
    InitialData d;
    d.phi0 = build_phi0(c);
    d.psi0 = psi_from_phi(d.phi0, c.psi_a, c.psi_b);
    d.phys = c.phys;
    if (c.a_target_auto) d.phys.a_target = arc_length_integral(d.phi0, d.phys);
    return d;
}

struct RunOptions {
    bool write_artifacts = true;
    bool keep_rows = false;
    bool track_energy = true;
    std::ostream* log = nullptr;
};

struct RunResult {
    Grid grid;
    PhysParams phys;
    SimState state;
    double t_end = 0.0;
    long steps_done = 0;
    std::vector<TimeSeriesRow> rows;

    double mass_psi0 = 0.0;
    double max_mass_err_rel = 0.0;
    long emod_violations = 0;
    double emod_worst_rise = 0.0;
    double max_residual_ac = 0.0;
    double max_residual_ch = 0.0;
    long mobility_warnings = 0;

    double total_seconds = 0.0;
    double ch_solve_seconds = 0.0;
    double ac_solve_seconds = 0.0;
    long pcg_iters_total = 0;
    long pcg_solves = 0;
    int pcg_iters_min = 0;
    int pcg_iters_max = 0;
};

inline TimeSeriesRow make_row(long step, double t, const ScalarField& phi, const ScalarField& psi,
                              const SavQuartet& sav, const PhysParams& pp, double e_mod,
                              const StepStats* stats) {
    TimeSeriesRow r;
    r.step = step;
    r.t = t;
    EnergyReport er = energy_components(phi, psi, pp);
    r.F_surf = er.F_surf;
    r.F_bend = er.F_bend;
    r.F_area = er.F_area;
    r.F_osm = er.F_osm;
    r.F_total = er.F_total;
    r.arc_length = er.arc_length;
    r.E_mod = e_mod;
    r.mass_phi = mass(phi);
    r.mass_psi = mass(psi);
    r.V = sav.V;
    r.U = sav.U;
    r.W = sav.W;
    r.Z = sav.Z;
    if (stats) {
        r.ac_residual = stats->residual_ac;
        r.ch_residual = stats->residual_ch;
        r.ch_solver_seconds = stats->t_ch_solve;
        r.pcg_iters = stats->pcg_iters_g + stats->pcg_iters_lam;
    }
    return r;
}

inline RunResult run_simulation(const RunConfig& cfg, const RunOptions& opt = {}) {
    cfg.validate();
    namespace fs = std::filesystem;
    fs::path outdir(cfg.output_dir);

    std::ofstream ts, timing;
    if (opt.write_artifacts) {
        fs::create_directories(outdir);
        std::ofstream rc(outdir / "resolved_config");
        rc << config_echo(cfg);
        ts.open(outdir / "timeseries.csv");
        ts << timeseries_header() << "\n";
        timing.open(outdir / "timing.csv");
        timing << "step,basis_seconds,assemble_seconds,ac_solve_seconds,ch_solve_seconds,"
                  "reduce_seconds,recover_seconds,energy_seconds,total_seconds\n";
    }

    InitialData init = build_initial_data(cfg);
    RunResult res;
    res.grid = init.phi0.grid;
    res.phys = init.phys;
    res.state = make_initial_state(init.phi0, init.psi0, init.phys);
    res.mass_psi0 = mass(init.psi0);

    Stepper stepper(res.grid, init.phys, cfg.dt, cfg.scheme, cfg.pcg_tol,
                    cfg.pcg_max_iters, cfg.startup_substeps);
    stepper.set_track_energy(opt.track_energy);

    auto snapshot = [&](long step, double t) {
        if (!opt.write_artifacts) return;
        char name[64];
        if (cfg.snapshot_every > 0 && step % cfg.snapshot_every == 0) {
            std::snprintf(name, sizeof(name), "phi_%06ld.f64", step);
            write_snapshot(outdir / name, res.state.phi_n, t);
            std::snprintf(name, sizeof(name), "psi_%06ld.f64", step);
            write_snapshot(outdir / name, res.state.psi_n, t);
        }
        if (cfg.ppm_every > 0 && step % cfg.ppm_every == 0) {
            std::snprintf(name, sizeof(name), "phi_%06ld.ppm", step);
            write_ppm(outdir / name, res.state.phi_n);
        }
    };

    // step-0 row: the two-level modified energy with equal levels reduces to
    // the physical total
    double e_mod0 = opt.track_energy
                        ? modified_energy(res.state.phi_n, res.state.phi_n, res.state.sav_n,
                                          res.state.sav_n, 0.0, init.phys)
                        : 0.0;
    TimeSeriesRow row0 =
        make_row(0, 0.0, res.state.phi_n, res.state.psi_n, res.state.sav_n, init.phys, e_mod0,
                 nullptr);
    if (opt.keep_rows) res.rows.push_back(row0);
    if (opt.write_artifacts) ts << format_row(row0) << "\n";
    snapshot(0, 0.0);

    EnergyMonotonicityChecker emod_check;
    const long nsteps = cfg.total_steps();
    for (long k = 0; k < nsteps; ++k) {
        StepStats stats = stepper.step(res.state);
        const long level = res.state.step;
        const double t = double(level) * cfg.dt;

        res.total_seconds += stats.t_total;
        res.ch_solve_seconds += stats.t_ch_solve;
        res.ac_solve_seconds += stats.t_ac_solve;
        if (scheme_is_classical(cfg.scheme) && !stats.startup) {
            // startup sub-steps solve a different (better conditioned)
            // system; the per-solve band tracks production steps only
            for (int it : {stats.pcg_iters_g, stats.pcg_iters_lam}) {
                res.pcg_iters_total += it;
                ++res.pcg_solves;
                res.pcg_iters_min = res.pcg_solves == 1 ? it : std::min(res.pcg_iters_min, it);
                res.pcg_iters_max = std::max(res.pcg_iters_max, it);
            }
        }
        if (stats.mobility_warning) {
            ++res.mobility_warnings;
            if (opt.log)
                *opt.log << "warning: non-positive face mobility at step " << level
                         << " (min = " << stats.min_face_mobility << ")\n";
        }
        if (stats.denom_floored && opt.log)
            *opt.log << "note: SAV denominator regularized at step " << level << "\n";
        double mass_err = std::abs(stats.mass_psi - res.mass_psi0) /
                          std::max(std::abs(res.mass_psi0), 1e-300);
        res.max_mass_err_rel = std::max(res.max_mass_err_rel, mass_err);
        res.max_residual_ac = std::max(res.max_residual_ac, stats.residual_ac);
        res.max_residual_ch = std::max(res.max_residual_ch, stats.residual_ch);
        if (opt.track_energy && level >= 2) emod_check.observe(stats.E_mod);

        if (level % cfg.record_every == 0 || k == nsteps - 1) {
            TimeSeriesRow row = make_row(level, t, res.state.phi_n, res.state.psi_n,
                                         res.state.sav_n, init.phys, stats.E_mod, &stats);
            if (opt.keep_rows) res.rows.push_back(row);
            if (opt.write_artifacts) {
                ts << format_row(row) << "\n";
                char buf[512];
                std::snprintf(buf, sizeof(buf),
                              "%ld,%.6g,%.6g,%.6g,%.6g,%.6g,%.6g,%.6g,%.6g", level, stats.t_basis,
                              stats.t_assemble, stats.t_ac_solve, stats.t_ch_solve,
                              stats.t_reduce, stats.t_recover, stats.t_energy, stats.t_total);
                timing << buf << "\n";
            }
        }
        snapshot(level, t);
        if (opt.log && (level % std::max(1L, nsteps / 10) == 0))
            *opt.log << "step " << level << "/" << nsteps << " t=" << t
                     << " mass_err=" << mass_err << "\n";
    }
    res.steps_done = res.state.step;
    res.t_end = double(res.steps_done) * cfg.dt;
    res.emod_violations = emod_check.violations;
    res.emod_worst_rise = emod_check.worst_rise;
    return res;
}

// smooth_only mode: construct and smooth the initial condition, write it out.
inline void run_smooth_only(const RunConfig& cfg) {
    cfg.validate();
    namespace fs = std::filesystem;
    fs::path outdir(cfg.output_dir);
    fs::create_directories(outdir);
    std::ofstream rc(outdir / "resolved_config");
    rc << config_echo(cfg);
    InitialData init = build_initial_data(cfg);
    write_snapshot(outdir / "phi_000000.f64", init.phi0, 0.0);
    write_snapshot(outdir / "psi_000000.f64", init.psi0, 0.0);
    write_ppm(outdir / "phi_000000.ppm", init.phi0);
}

}  // namespace vcc
