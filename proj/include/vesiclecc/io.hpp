// io.hpp
// On-disk artifacts: raw field snapshots ("VCF1", little-endian f64),
// P6 heatmaps over [-1,1], and full-precision CSV time series.

#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "vesiclecc/diagnostics.hpp"

namespace vcc {

// Snapshot layout: 32-byte header [magic "VCF1" | u32 m | u32 n | f64 h |
// f64 t | 4 zero pad bytes], then m*n little-endian doubles, row-major with
// x fastest. Fixed layout so external harnesses can read it byte-exactly.
inline void write_snapshot(const std::filesystem::path& path, const ScalarField& f, double t) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open snapshot for writing: " + path.string());
    char header[32] = {};
    std::memcpy(header, "VCF1", 4);
    std::uint32_t m = std::uint32_t(f.grid.m), n = std::uint32_t(f.grid.n);
    std::memcpy(header + 4, &m, 4);
    std::memcpy(header + 8, &n, 4);
    std::memcpy(header + 12, &f.grid.h, 8);
    std::memcpy(header + 20, &t, 8);
    out.write(header, 32);
    out.write(reinterpret_cast<const char*>(f.data()), std::streamsize(f.size() * 8));
    if (!out) throw std::runtime_error("snapshot write failed: " + path.string());
}

inline ScalarField read_snapshot(const std::filesystem::path& path, double* t_out = nullptr) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open snapshot: " + path.string());
    char header[32];
    in.read(header, 32);
    if (!in || std::memcmp(header, "VCF1", 4) != 0)
        throw std::runtime_error("bad snapshot header: " + path.string());
    std::uint32_t m, n;
    double h, t;
    std::memcpy(&m, header + 4, 4);
    std::memcpy(&n, header + 8, 4);
    std::memcpy(&h, header + 12, 8);
    std::memcpy(&t, header + 20, 8);
    ScalarField f(Grid(int(m), int(n), h));
    in.read(reinterpret_cast<char*>(f.data()), std::streamsize(f.size() * 8));
    if (!in) throw std::runtime_error("snapshot truncated: " + path.string());
    if (t_out) *t_out = t;
    return f;
}

// Binary P6 with a linear blue-white-red map over [-1, 1].
inline void write_ppm(const std::filesystem::path& path, const ScalarField& f) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open ppm for writing: " + path.string());
    const int m = f.grid.m, n = f.grid.n;
    out << "P6\n" << m << " " << n << "\n255\n";
    std::vector<unsigned char> row(std::size_t(m) * 3);
    for (int j = n - 1; j >= 0; --j) {  // image rows top-down, y up
        for (int i = 0; i < m; ++i) {
            double t = std::clamp(0.5 * (f(i, j) + 1.0), 0.0, 1.0);
            double r, g, b;
            if (t < 0.5) {  // blue -> white
                double s = t / 0.5;
                r = s;
                g = s;
                b = 1.0;
            } else {  // white -> red
                double s = (t - 0.5) / 0.5;
                r = 1.0;
                g = 1.0 - s;
                b = 1.0 - s;
            }
            row[3 * i + 0] = static_cast<unsigned char>(std::lround(255.0 * r));
            row[3 * i + 1] = static_cast<unsigned char>(std::lround(255.0 * g));
            row[3 * i + 2] = static_cast<unsigned char>(std::lround(255.0 * b));
        }
        out.write(reinterpret_cast<const char*>(row.data()), std::streamsize(row.size()));
    }
}

inline const char* timeseries_header() {
    return "step,t,F_surf,F_bend,F_area,F_osm,F_total,E_mod,mass_phi,mass_psi,arc_length,"
           "V,U,W,Z,ac_residual,ch_residual,ch_solver_seconds,pcg_iters";
}

inline std::string format_row(const TimeSeriesRow& r) {
    char buf[1024];
    std::snprintf(buf, sizeof(buf),
                  "%ld,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,"
                  "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d",
                  r.step, r.t, r.F_surf, r.F_bend, r.F_area, r.F_osm, r.F_total, r.E_mod,
                  r.mass_phi, r.mass_psi, r.arc_length, r.V, r.U, r.W, r.Z, r.ac_residual,
                  r.ch_residual, r.ch_solver_seconds, r.pcg_iters);
    return buf;
}

}  // namespace vcc
