// config.hpp
// Run configuration: a single-level key = value document plus command-line
// overrides. Parsing is strict -- unknown keys and malformed values are
// rejected by name -- and the fully resolved configuration is echoed into
// the output directory for provenance.

#pragma once

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "vesiclecc/init.hpp"
#include "vesiclecc/params.hpp"

namespace vcc {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class RunMode { simulate, temporal_study, spatial_study, refinement_study, benchmark,
                     smooth_only };

inline RunMode mode_from_name(const std::string& s) {
    if (s == "simulate") return RunMode::simulate;
    if (s == "temporal_study") return RunMode::temporal_study;
    if (s == "spatial_study") return RunMode::spatial_study;
    if (s == "refinement_study") return RunMode::refinement_study;
    if (s == "benchmark") return RunMode::benchmark;
    if (s == "smooth_only") return RunMode::smooth_only;
    throw ConfigError("unknown mode: " + s);
}

inline std::string mode_name(RunMode m) {
    switch (m) {
        case RunMode::simulate: return "simulate";
        case RunMode::temporal_study: return "temporal_study";
        case RunMode::spatial_study: return "spatial_study";
        case RunMode::refinement_study: return "refinement_study";
        case RunMode::benchmark: return "benchmark";
        case RunMode::smooth_only: return "smooth_only";
    }
    return "?";
}

struct RunConfig {
    RunMode mode = RunMode::simulate;
    Scheme scheme = Scheme::cc_bdf2;

    int n = 256;             // cells per direction (square grid)
    double domain_size = 2.0;

    double dt = 1e-6;
    double t_final = 0.02;
    long steps = 0;          // 0 = derive from t_final

    PhysParams phys;         // growth-benchmark defaults
    bool a_target_auto = true;  // compute a_target from the smoothed IC

    ShapeSpec shape;
    double psi_a = -0.35;    // growth profile
    double psi_b = 0.45;

    SmoothingOptions smoothing;

    std::string output_dir = "vesiclecc_out";
    long snapshot_every = 0;
    long record_every = 1;
    long ppm_every = 0;

    double pcg_tol = 1e-10;
    int pcg_max_iters = 500;
    int startup_substeps = 32;  // sub-steps of the first macro step (BDF2 schemes)

    // study parameters
    double temporal_dt0 = 1e-5;
    int temporal_levels = 4;
    std::vector<int> spatial_n_list = {128, 256, 512};
    int refine_n0 = 128;
    int refine_n_max = 512;
    double refine_c = 0.002;
    std::vector<int> bench_n_list = {128, 256, 512};
    long bench_steps = 100;
    std::vector<std::string> bench_schemes = {"cc", "classical"};

    // NLMG reference-solver keys: accepted for config compatibility with the
    // benchmark parameter table, ignored by this solver.
    double nlmg_tol = 1e-8;
    int nlmg_minlevel = -8;
    int nlmg_presmooth = 2;
    int nlmg_postsmooth = 2;
    int nlmg_maxits = 100;

    Grid make_grid() const { return Grid(n, n, domain_size / n); }
    long total_steps() const {
        return steps > 0 ? steps : long(std::llround(t_final / dt));
    }

    void validate() const {
        if (n < 4) throw ConfigError("n must be >= 4");
        if (!(domain_size > 0)) throw ConfigError("domain_size must be > 0");
        if (!(dt > 0)) throw ConfigError("dt must be > 0");
        if (steps < 0) throw ConfigError("steps must be >= 0");
        if (!(t_final > 0) && steps == 0) throw ConfigError("t_final must be > 0");
        if (record_every < 1) throw ConfigError("record_every must be >= 1");
        try {
            phys.validate();
        } catch (const std::exception& e) {
            throw ConfigError(e.what());
        }
        if (temporal_levels < 1) throw ConfigError("temporal_levels must be >= 1");
        if (!(temporal_dt0 > 0)) throw ConfigError("temporal_dt0 must be > 0");
        for (int nn : spatial_n_list)
            if (nn < 4) throw ConfigError("spatial_n_list entries must be >= 4");
        if (refine_n0 < 4 || refine_n_max < refine_n0) throw ConfigError("bad refinement range");
        if (!(refine_c > 0)) throw ConfigError("refine_c must be > 0");
        if (!(pcg_tol > 0)) throw ConfigError("pcg_tol must be > 0");
        if (pcg_max_iters < 1) throw ConfigError("pcg_max_iters must be >= 1");
        if (startup_substeps < 1) throw ConfigError("startup_substeps must be >= 1");
        for (const auto& s : bench_schemes)
            if (s != "cc" && s != "classical") throw ConfigError("bench_schemes: use cc|classical");
    }
};

namespace detail {

inline double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing chars");
        return x;
    } catch (...) {
        throw ConfigError("invalid numeric value for key '" + key + "': " + v);
    }
}

inline long parse_long(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        long x = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing chars");
        return x;
    } catch (...) {
        throw ConfigError("invalid integer value for key '" + key + "': " + v);
    }
}

inline std::vector<int> parse_int_list(const std::string& key, const std::string& v) {
    std::vector<int> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(int(parse_long(key, item)));
    if (out.empty()) throw ConfigError("empty list for key '" + key + "'");
    return out;
}

inline std::vector<std::string> parse_str_list(const std::string& v) {
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

inline std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return a == std::string::npos ? "" : s.substr(a, b - a + 1);
}

inline std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

inline std::string join_ints(const std::vector<int>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
    return s;
}

inline std::string join_strs(const std::vector<std::string>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i];
    return s;
}

}  // namespace detail

// Apply one key = value assignment. Throws ConfigError for unknown keys.
inline void config_set(RunConfig& c, const std::string& key, const std::string& value) {
    using detail::parse_double;
    using detail::parse_long;
    auto d = [&] { return parse_double(key, value); };
    auto l = [&] { return parse_long(key, value); };

    if (key == "mode") c.mode = mode_from_name(value);
    else if (key == "scheme") {
        try { c.scheme = scheme_from_name(value); }
        catch (const std::exception& e) { throw ConfigError(e.what()); }
    }
    else if (key == "n") c.n = int(l());
    else if (key == "domain_size") c.domain_size = d();
    else if (key == "dt") c.dt = d();
    else if (key == "t_final") c.t_final = d();
    else if (key == "steps") c.steps = l();
    else if (key == "gamma_surf") c.phys.gamma_surf = d();
    else if (key == "gamma_bend") c.phys.gamma_bend = d();
    else if (key == "gamma_area") c.phys.gamma_area = d();
    else if (key == "gamma_in") c.phys.gamma_in = d();
    else if (key == "gamma_out") c.phys.gamma_out = d();
    else if (key == "psi_in") c.phys.psi_in = d();
    else if (key == "psi_out") c.phys.psi_out = d();
    else if (key == "beta_in") c.phys.beta_in = d();
    else if (key == "beta_out") c.phys.beta_out = d();
    else if (key == "eps") c.phys.eps = d();
    else if (key == "m_phi") c.phys.m_phi = d();
    else if (key == "m0") c.phys.m0 = d();
    else if (key == "theta") c.phys.theta = d();
    else if (key == "beta") c.phys.beta_stab = d();
    else if (key == "lambda") c.phys.lambda_stab = d();
    else if (key == "a_target") {
        if (value == "auto") c.a_target_auto = true;
        else { c.a_target_auto = false; c.phys.a_target = d(); }
    }
    else if (key == "shape") {
        try { c.shape.kind = shape_from_name(value); }
        catch (const std::exception& e) { throw ConfigError(e.what()); }
    }
    else if (key == "shape_center_x") c.shape.cx = d();
    else if (key == "shape_center_y") c.shape.cy = d();
    else if (key == "shape_rotation") c.shape.rotation = d();
    else if (key == "ellipse_a") c.shape.a = d();
    else if (key == "ellipse_b") c.shape.b = d();
    else if (key == "triangle_edge") c.shape.triangle_edge = d();
    else if (key == "star_r0") c.shape.star_r0 = d();
    else if (key == "star_points") c.shape.star_points = int(l());
    else if (key == "star_amp") c.shape.star_amp = d();
    else if (key == "hexagon_edge") c.shape.hexagon_edge = d();
    else if (key == "crescent_r_outer") c.shape.crescent_r_outer = d();
    else if (key == "crescent_r_inner") c.shape.crescent_r_inner = d();
    else if (key == "psi_a") c.psi_a = d();
    else if (key == "psi_b") c.psi_b = d();
    else if (key == "smooth_mobility") c.smoothing.mobility = d();
    else if (key == "smooth_dt") c.smoothing.dt = d();
    else if (key == "smooth_t") c.smoothing.t_final = d();
    else if (key == "output_dir") c.output_dir = value;
    else if (key == "snapshot_every") c.snapshot_every = l();
    else if (key == "record_every") c.record_every = l();
    else if (key == "ppm_every") c.ppm_every = l();
    else if (key == "pcg_tol") c.pcg_tol = d();
    else if (key == "pcg_max_iters") c.pcg_max_iters = int(l());
    else if (key == "startup_substeps") c.startup_substeps = int(l());
    else if (key == "temporal_dt0") c.temporal_dt0 = d();
    else if (key == "temporal_levels") c.temporal_levels = int(l());
    else if (key == "spatial_n_list") c.spatial_n_list = detail::parse_int_list(key, value);
    else if (key == "refine_n0") c.refine_n0 = int(l());
    else if (key == "refine_n_max") c.refine_n_max = int(l());
    else if (key == "refine_c") c.refine_c = d();
    else if (key == "bench_n_list") c.bench_n_list = detail::parse_int_list(key, value);
    else if (key == "bench_steps") c.bench_steps = l();
    else if (key == "bench_schemes") c.bench_schemes = detail::parse_str_list(value);
    else if (key == "nlmg_tol") c.nlmg_tol = d();
    else if (key == "nlmg_minlevel") c.nlmg_minlevel = int(l());
    else if (key == "nlmg_presmooth") c.nlmg_presmooth = int(l());
    else if (key == "nlmg_postsmooth") c.nlmg_postsmooth = int(l());
    else if (key == "nlmg_maxits") c.nlmg_maxits = int(l());
    else throw ConfigError("unknown config key: " + key);
}

// Parse a key = value file (empty/whitespace lines and '#' comments allowed).
inline void parse_config_file(RunConfig& c, const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path.string());
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string s = detail::trim(line);
        if (s.empty() || s[0] == '#') continue;
        auto eq = s.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path.string() + ":" + std::to_string(lineno) +
                              ": expected 'key = value'");
        std::string key = detail::trim(s.substr(0, eq));
        std::string value = detail::trim(s.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": empty key or value");
        config_set(c, key, value);
    }
}

// Serialize every key in canonical order (the echoed file parses back to
// the same configuration).
inline std::string config_echo(const RunConfig& c) {
    using detail::fmt;
    std::ostringstream o;
    o << "mode = " << mode_name(c.mode) << "\n";
    o << "scheme = " << scheme_name(c.scheme) << "\n";
    o << "n = " << c.n << "\n";
    o << "domain_size = " << fmt(c.domain_size) << "\n";
    o << "dt = " << fmt(c.dt) << "\n";
    o << "t_final = " << fmt(c.t_final) << "\n";
    o << "steps = " << c.steps << "\n";
    o << "gamma_surf = " << fmt(c.phys.gamma_surf) << "\n";
    o << "gamma_bend = " << fmt(c.phys.gamma_bend) << "\n";
    o << "gamma_area = " << fmt(c.phys.gamma_area) << "\n";
    o << "gamma_in = " << fmt(c.phys.gamma_in) << "\n";
    o << "gamma_out = " << fmt(c.phys.gamma_out) << "\n";
    o << "psi_in = " << fmt(c.phys.psi_in) << "\n";
    o << "psi_out = " << fmt(c.phys.psi_out) << "\n";
    o << "beta_in = " << fmt(c.phys.beta_in) << "\n";
    o << "beta_out = " << fmt(c.phys.beta_out) << "\n";
    o << "eps = " << fmt(c.phys.eps) << "\n";
    o << "m_phi = " << fmt(c.phys.m_phi) << "\n";
    o << "m0 = " << fmt(c.phys.m0) << "\n";
    o << "theta = " << fmt(c.phys.theta) << "\n";
    o << "beta = " << fmt(c.phys.beta_stab) << "\n";
    o << "lambda = " << fmt(c.phys.lambda_stab) << "\n";
    if (c.a_target_auto) o << "a_target = auto\n";
    else o << "a_target = " << fmt(c.phys.a_target) << "\n";
    o << "shape = " << shape_name(c.shape.kind) << "\n";
    o << "shape_center_x = " << fmt(c.shape.cx) << "\n";
    o << "shape_center_y = " << fmt(c.shape.cy) << "\n";
    o << "shape_rotation = " << fmt(c.shape.rotation) << "\n";
    o << "ellipse_a = " << fmt(c.shape.a) << "\n";
    o << "ellipse_b = " << fmt(c.shape.b) << "\n";
    o << "triangle_edge = " << fmt(c.shape.triangle_edge) << "\n";
    o << "star_r0 = " << fmt(c.shape.star_r0) << "\n";
    o << "star_points = " << c.shape.star_points << "\n";
    o << "star_amp = " << fmt(c.shape.star_amp) << "\n";
    o << "hexagon_edge = " << fmt(c.shape.hexagon_edge) << "\n";
    o << "crescent_r_outer = " << fmt(c.shape.crescent_r_outer) << "\n";
    o << "crescent_r_inner = " << fmt(c.shape.crescent_r_inner) << "\n";
    o << "psi_a = " << fmt(c.psi_a) << "\n";
    o << "psi_b = " << fmt(c.psi_b) << "\n";
    o << "smooth_mobility = " << fmt(c.smoothing.mobility) << "\n";
    o << "smooth_dt = " << fmt(c.smoothing.dt) << "\n";
    o << "smooth_t = " << fmt(c.smoothing.t_final) << "\n";
    o << "output_dir = " << c.output_dir << "\n";
    o << "snapshot_every = " << c.snapshot_every << "\n";
    o << "record_every = " << c.record_every << "\n";
    o << "ppm_every = " << c.ppm_every << "\n";
    o << "pcg_tol = " << fmt(c.pcg_tol) << "\n";
    o << "pcg_max_iters = " << c.pcg_max_iters << "\n";
    o << "startup_substeps = " << c.startup_substeps << "\n";
    o << "temporal_dt0 = " << fmt(c.temporal_dt0) << "\n";
    o << "temporal_levels = " << c.temporal_levels << "\n";
    o << "spatial_n_list = " << detail::join_ints(c.spatial_n_list) << "\n";
    o << "refine_n0 = " << c.refine_n0 << "\n";
    o << "refine_n_max = " << c.refine_n_max << "\n";
    o << "refine_c = " << fmt(c.refine_c) << "\n";
    o << "bench_n_list = " << detail::join_ints(c.bench_n_list) << "\n";
    o << "bench_steps = " << c.bench_steps << "\n";
    o << "bench_schemes = " << detail::join_strs(c.bench_schemes) << "\n";
    o << "nlmg_tol = " << fmt(c.nlmg_tol) << "\n";
    o << "nlmg_minlevel = " << c.nlmg_minlevel << "\n";
    o << "nlmg_presmooth = " << c.nlmg_presmooth << "\n";
    o << "nlmg_postsmooth = " << c.nlmg_postsmooth << "\n";
    o << "nlmg_maxits = " << c.nlmg_maxits << "\n";
    return o.str();
}

}  // namespace vcc
