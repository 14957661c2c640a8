// params.hpp
// Physical and numerical model constants, with the growth-benchmark values
// as defaults, plus the scalar auxiliary variable quartet.

#pragma once

#include <stdexcept>
#include <string>

#include "vesiclecc/field.hpp"

namespace vcc {

enum class Scheme { cc_bdf2, cc_bdf1, classical_bdf2, classical_bdf1 };

inline bool scheme_is_classical(Scheme s) {
    return s == Scheme::classical_bdf2 || s == Scheme::classical_bdf1;
}
inline bool scheme_is_bdf1(Scheme s) {
    return s == Scheme::cc_bdf1 || s == Scheme::classical_bdf1;
}

inline std::string scheme_name(Scheme s) {
    switch (s) {
        case Scheme::cc_bdf2: return "cc_bdf2";
        case Scheme::cc_bdf1: return "cc_bdf1";
        case Scheme::classical_bdf2: return "classical_bdf2";
        case Scheme::classical_bdf1: return "classical_bdf1";
    }
    return "?";
}

inline Scheme scheme_from_name(const std::string& s) {
    if (s == "cc_bdf2") return Scheme::cc_bdf2;
    if (s == "cc_bdf1") return Scheme::cc_bdf1;
    if (s == "classical_bdf2") return Scheme::classical_bdf2;
    if (s == "classical_bdf1") return Scheme::classical_bdf1;
    throw std::invalid_argument("unknown scheme: " + s);
}

struct PhysParams {
    double gamma_surf = 1.0;
    double gamma_bend = 0.05;   // growth default; shrinkage benchmark uses 1.0
    double gamma_area = 5.0e4;
    double gamma_in = 1.0e5;
    double gamma_out = 1.0e5;
    double psi_in = 0.65;       // growth default; shrinkage uses 0.1
    double psi_out = 0.8;
    double beta_in = 0.0;
    double beta_out = 0.0;
    double eps = 0.03125;
    double m_phi = 1.0;
    double m0 = 0.5;
    double a_target = 0.0;      // target arc length; normally set from the IC
    double beta_stab = 0.0;     // SAV shift beta
    double theta = 1.5;         // Allen-Cahn stabilization
    double lambda_stab = 1.0e5; // Cahn-Hilliard stabilization

    void validate() const {
        if (!(eps > 0.0)) throw std::invalid_argument("eps must be > 0");
        if (!(m_phi > 0.0)) throw std::invalid_argument("m_phi must be > 0");
        if (!(m0 > 0.0 && m0 < 1.0)) throw std::invalid_argument("m0 must be in (0,1)");
        if (theta < 0.0) throw std::invalid_argument("theta must be >= 0");
        if (lambda_stab < 0.0) throw std::invalid_argument("lambda must be >= 0");
        if (beta_stab < 0.0) throw std::invalid_argument("beta must be >= 0");
    }

    // theta_tilde = theta + gamma_bend * 3 sqrt(2) / (4 eps)
    double theta_tilde() const { return theta + gamma_bend * 3.0 * kSqrt2 / (4.0 * eps); }
};

// The four scalar auxiliary variables at one time level.
struct SavQuartet {
    double V = 0.0;
    double U = 0.0;
    double W = 0.0;
    double Z = 0.0;
};

}  // namespace vcc
