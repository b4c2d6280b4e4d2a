#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

#include "twj/common.hpp"

namespace twj {

// (p, m, n): dimension, error degrees of freedom, hypothesis degrees of freedom.
struct StatParams {
    int p = 1;
    int m = 1;
    int n = 1;

    StatParams() = default;
    StatParams(int p_, int m_, int n_) : p(p_), m(m_), n(n_) {
        if (p < 1 || n < 1 || m < 1)
            throw validation_error("p, m and n must all be positive integers");
        if (m < p)
            throw validation_error("m >= p is required (A is singular when m < p); got m=" +
                                   std::to_string(m) + ", p=" + std::to_string(p));
    }

    bool at_boundary() const { return m == p; }
    bool operator==(const StatParams&) const = default;
};

struct JacobiParams {
    int N = 0;
    double alpha = 0.0;
    double beta = 0.0;
    Ensemble ensemble = Ensemble::complex;

    JacobiParams() = default;
    JacobiParams(int N_, double a, double b, Ensemble e = Ensemble::complex)
        : N(N_), alpha(a), beta(b), ensemble(e) {
        if (N < 0) throw validation_error("Jacobi degree N must be nonnegative");
        if (!(alpha >= 0.0) || !(beta >= 0.0))
            throw validation_error("Jacobi exponents alpha and beta must be nonnegative");
    }

    double kappa() const { return 2.0 * N + alpha + beta + 1.0; }
    bool hard_edge() const { return alpha == 0.0; }
    JacobiParams with_degree(int k) const { return JacobiParams(k, alpha, beta, ensemble); }
};

struct LGParams {
    double kappa = 1.0;
    double lambda = 0.0;
    double mu = 0.0;
};

struct Angles {
    double gamma = 0.0;
    double phi = 0.0;
};

struct TurningPoints {
    double x_minus = -1.0;
    double x_plus = 1.0;
};

inline StatParams dual(const StatParams& s) { return StatParams(s.n, s.m + s.n - s.p, s.p); }

inline JacobiParams to_jacobi(const StatParams& s, Ensemble e) {
    const int lo = std::min(s.p, s.n);
    const int N = e == Ensemble::real ? lo - 1 : lo;
    return JacobiParams(N, double(s.m - s.p), double(std::abs(s.n - s.p)), e);
}

inline Angles angles_from_jacobi(const JacobiParams& j) {
    const double k = j.kappa();
    return {2.0 * std::asin(std::sqrt((j.N + 0.5) / k)),
            2.0 * std::asin(std::sqrt((j.N + j.beta + 0.5) / k))};
}

inline Angles angles_from_stat(const StatParams& s) {
    const double d = double(s.m) + double(s.n) - 1.0;
    const double lo = std::min(s.p, s.n), hi = std::max(s.p, s.n);
    return {2.0 * std::asin(std::sqrt((lo - 0.5) / d)), 2.0 * std::asin(std::sqrt((hi - 0.5) / d))};
}

inline LGParams lg_params(const JacobiParams& j) {
    const double k = j.kappa();
    return {k, j.alpha / k, j.beta / k};
}

inline TurningPoints turning_points(const Angles& a) {
    return {-std::cos(a.phi - a.gamma), -std::cos(a.phi + a.gamma)};
}

inline TurningPoints turning_points(const LGParams& g) {
    const double l = g.lambda, m = g.mu;
    const double c = m * m - l * l;
    const double r = std::sqrt(std::max(0.0, (1.0 - (l + m) * (l + m)) * (1.0 - (l - m) * (l - m))));
    return {c - r, c + r};
}

// Scale of the upper soft edge on the x axis.
inline double sigma_x(const JacobiParams& j) {
    const Angles a = angles_from_jacobi(j);
    const double k = j.kappa();
    const double s = std::sin(a.phi + a.gamma);
    return std::cbrt(2.0 * s * s * s * s / (k * k * std::sin(a.phi) * std::sin(a.gamma)));
}

}  // namespace twj
