// vesiclecc_main.cpp
// Batch CLI: vesiclecc <mode> [--config <path>] [--set key=value]...
// Modes: simulate, temporal_study, spatial_study, refinement_study,
// benchmark, smooth_only.
// Exit codes: 0 success, 2 configuration error, 3 solver failure.

#include <cstring>
#include <iostream>

#include "vesiclecc/vesiclecc.hpp"

namespace {

void usage(std::ostream& os) {
    os << "usage: vesiclecc <mode> [--config <path>] [--set key=value]...\n"
          "modes:\n"
          "  simulate          advance the coupled system and write time series/snapshots\n"
          "  temporal_study    Cauchy time-step refinement study\n"
          "  spatial_study     grid refinement study at fixed dt\n"
          "  refinement_study  coupled space-time refinement (dt = C h)\n"
          "  benchmark         CC vs classical solver cost comparison\n"
          "  smooth_only       build and smooth the initial condition only\n"
          "\n"
          "Config is a key = value file; --set overrides individual keys.\n"
          "VESICLECC_THREADS caps internal transform parallelism.\n";
}

int run(const vcc::RunConfig& cfg) {
    namespace fs = std::filesystem;
    switch (cfg.mode) {
        case vcc::RunMode::simulate: {
            vcc::RunOptions opt;
            opt.log = &std::cout;
            vcc::RunResult r = vcc::run_simulation(cfg, opt);
            std::cout << "done: " << r.steps_done << " steps, t = " << r.t_end
                      << ", max relative mass error = " << r.max_mass_err_rel << "\n";
            if (r.emod_violations > 0)
                std::cout << "note: E_mod rose on " << r.emod_violations
                          << " steps (worst rise " << r.emod_worst_rise << ")\n";
            return 0;
        }
        case vcc::RunMode::smooth_only:
            vcc::run_smooth_only(cfg);
            return 0;
        case vcc::RunMode::temporal_study: {
            fs::create_directories(cfg.output_dir);
            {
                std::ofstream rc(fs::path(cfg.output_dir) / "resolved_config");
                rc << vcc::config_echo(cfg);
            }
            auto rep = vcc::temporal_cauchy_study(
                cfg, vcc::halving_dt_list(cfg.temporal_dt0, cfg.temporal_levels), &std::cout);
            vcc::write_convergence_csv(fs::path(cfg.output_dir) / "temporal.csv", rep, "dt");
            for (std::size_t i = 0; i < rep.rate_comb.size(); ++i)
                std::cout << "rate[" << i << "] = " << rep.rate_comb[i] << "\n";
            return 0;
        }
        case vcc::RunMode::spatial_study: {
            fs::create_directories(cfg.output_dir);
            {
                std::ofstream rc(fs::path(cfg.output_dir) / "resolved_config");
                rc << vcc::config_echo(cfg);
            }
            auto rep = vcc::spatial_study(cfg, cfg.spatial_n_list, cfg.dt, &std::cout);
            vcc::write_convergence_csv(fs::path(cfg.output_dir) / "spatial.csv", rep, "n");
            for (std::size_t i = 0; i < rep.rate_comb.size(); ++i)
                std::cout << "rate[" << i << "] = " << rep.rate_comb[i] << "\n";
            return 0;
        }
        case vcc::RunMode::refinement_study: {
            fs::create_directories(cfg.output_dir);
            {
                std::ofstream rc(fs::path(cfg.output_dir) / "resolved_config");
                rc << vcc::config_echo(cfg);
            }
            auto rep = vcc::refinement_path_study(cfg, cfg.refine_n0, cfg.refine_n_max,
                                                  cfg.refine_c, &std::cout);
            vcc::write_convergence_csv(fs::path(cfg.output_dir) / "refinement.csv", rep, "n");
            for (std::size_t i = 0; i < rep.rate_comb.size(); ++i)
                std::cout << "rate[" << i << "] = " << rep.rate_comb[i] << "\n";
            return 0;
        }
        case vcc::RunMode::benchmark: {
            fs::create_directories(cfg.output_dir);
            {
                std::ofstream rc(fs::path(cfg.output_dir) / "resolved_config");
                rc << vcc::config_echo(cfg);
            }
            auto rows = vcc::run_benchmark(cfg, cfg.bench_n_list, cfg.bench_schemes,
                                           cfg.bench_steps, &std::cout);
            vcc::write_benchmark_csv(cfg.output_dir, rows);
            return 0;
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2 || std::strcmp(argv[1], "--help") == 0 || std::strcmp(argv[1], "-h") == 0) {
        usage(argc < 2 ? std::cerr : std::cout);
        return argc < 2 ? 2 : 0;
    }
    vcc::RunConfig cfg;
    try {
        cfg.mode = vcc::mode_from_name(argv[1]);
        for (int i = 2; i < argc; ++i) {
            std::string arg = argv[i];
            if (arg == "--config") {
                if (++i >= argc) throw vcc::ConfigError("--config needs a path");
                vcc::parse_config_file(cfg, argv[i]);
            } else if (arg == "--set") {
                if (++i >= argc) throw vcc::ConfigError("--set needs key=value");
                std::string kv = argv[i];
                auto eq = kv.find('=');
                if (eq == std::string::npos) throw vcc::ConfigError("--set needs key=value");
                vcc::config_set(cfg, kv.substr(0, eq), kv.substr(eq + 1));
            } else {
                throw vcc::ConfigError("unknown argument: " + arg);
            }
        }
        cfg.mode = vcc::mode_from_name(argv[1]);  // CLI mode wins over file key
        cfg.validate();
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }
    try {
        return run(cfg);
    } catch (const std::exception& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return 3;
    }
}
