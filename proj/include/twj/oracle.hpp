#pragma once

#include <cmath>
#include <string>

#include <Eigen/Dense>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/beta.hpp>

#include "twj/common.hpp"
#include "twj/quadrature.hpp"
#include "twj/special.hpp"

namespace twj {

// Largest root for p = 1 is Beta(n/2, m/2).
inline double exact_cdf_p1(int m, int n, double x) {
    if (m < 1 || n < 1) throw validation_error("exact_cdf_p1: m and n must be positive");
    if (!(x >= 0.0 && x <= 1.0)) throw validation_error("exact_cdf_p1: x must lie in [0, 1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    return boost::math::ibeta(0.5 * n, 0.5 * m, x);
}

enum class PairOrdering { below_diagonal, above_diagonal };

namespace oracle_detail {

struct P2Setup {
    double a;   // exponent of (1 - theta)
    double b;   // exponent of theta
    int c;      // power of |theta_1 - theta_2|
};

inline P2Setup setup(int m, int n, Ensemble e) {
    constexpr int p = 2;
    P2Setup s{};
    if (e == Ensemble::real) {
        s = {0.5 * (m - p - 1), 0.5 * (n - p - 1), 1};
    } else {
        s = {double(m - p), double(n - p), 2};
    }
    if (!(s.a > -1.0) || !(s.b > -1.0))
        throw validation_error("exact_cdf_p2: density exponents must exceed -1 (need m, n >= 2 real, >= 2 complex)");
    return s;
}

// G_k(t) = integral over (0, t) of (1 - u)^a u^(b + k) du.
inline double G(const P2Setup& s, int k, double t) {
    if (t <= 0.0) return 0.0;
    return boost::math::beta(s.b + k + 1.0, s.a + 1.0, std::min(t, 1.0));
}

inline double binom(int c, int j) { return c == 2 && j == 1 ? 2.0 : 1.0; }

// Integral over the half of [0, x]^2 with theta_2 < theta_1 (or theta_2 > theta_1), as a 1-D
// quadrature whose inner integral is expanded into incomplete beta functions.
inline double half_square(const P2Setup& s, double x, PairOrdering ord, double& err) {
    auto outer = [&](double t) {
        if (t <= 0.0 || t >= 1.0) return 0.0;
        double inner = 0;
        for (int j = 0; j <= s.c; ++j) {
            // (t - u)^c = sum_j binom(c, j) t^(c-j) (-u)^j
            const double coef = binom(s.c, j) * std::pow(t, s.c - j) * (j % 2 ? -1.0 : 1.0);
            const double piece = ord == PairOrdering::below_diagonal ? G(s, j, t) : G(s, j, x) - G(s, j, t);
            inner += coef * piece;
        }
        if (ord == PairOrdering::above_diagonal && s.c % 2 == 1) inner = -inner;
        return std::pow(1.0 - t, s.a) * std::pow(t, s.b) * inner;
    };
    boost::math::quadrature::tanh_sinh<double> ts;
    double L1 = 0;
    const double v = ts.integrate(outer, 0.0, x, 1e-14, &err, &L1);
    err = std::max(err, 1e-15 * L1);
    return v;
}

}  // namespace oracle_detail

// P(theta_1 <= x) for p = 2 from the joint root density, as a ratio of integrals.
inline double exact_cdf_p2(int m, int n, double x, Ensemble e = Ensemble::real,
                           PairOrdering ord = PairOrdering::below_diagonal) {
    if (!(x >= 0.0 && x <= 1.0)) throw validation_error("exact_cdf_p2: x must lie in [0, 1]");
    const auto s = oracle_detail::setup(m, n, e);
    if (x == 0.0) return 0.0;
    double e1 = 0, e2 = 0;
    const double den = oracle_detail::half_square(s, 1.0, ord, e2);
    if (x == 1.0) return 1.0;
    const double num = oracle_detail::half_square(s, x, ord, e1);
    const double r = num / den;
    const double err = std::fabs(r) * (e1 / std::fabs(num) + e2 / std::fabs(den));
    if (!(err <= 1e-8))
        throw numerical_error("exact_cdf_p2: tolerance 1e-8 not reached (estimate " + std::to_string(r) +
                              ", error " + std::to_string(err) + ")");
    return r;
}

struct FredholmResult {
    double value = 0;
    int nodes = 0;
    bool converged = false;
};

// det(I - S_A) on L^2(s0, inf) by Gauss-Legendre Nystrom discretization, doubling nodes.
inline FredholmResult fredholm_f2_ex(double s0) {
    if (!std::isfinite(s0)) throw validation_error("fredholm_f2: s0 must be finite");
    const double hi = std::max(s0, 0.0) + 16.0;
    auto det_at = [&](int n) {
        const quad::Rule& r = quad::gauss_legendre(n);
        const double c = 0.5 * (s0 + hi), h = 0.5 * (hi - s0);
        Eigen::VectorXd x(n), sw(n);
        for (int i = 0; i < n; ++i) {
            x(i) = c + h * r.x[i];
            sw(i) = std::sqrt(h * r.w[i]);
        }
        Eigen::MatrixXd M(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) M(i, j) = M(j, i) = (i == j ? 1.0 : 0.0) - sw(i) * sw(j) * airy_kernel(x(i), x(j));
        return M.partialPivLu().determinant();
    };
    FredholmResult res;
    int n = 24;
    double prev = det_at(n);
    for (; n <= 768; n *= 2) {
        const double cur = det_at(2 * n);
        res.value = cur;
        res.nodes = 2 * n;
        if (std::fabs(cur - prev) < 1e-8) {
            res.converged = true;
            break;
        }
        prev = cur;
    }
    return res;
}

inline double fredholm_f2(double s0) {
    const FredholmResult r = fredholm_f2_ex(s0);
    if (!r.converged) throw numerical_error("fredholm_f2: Nystrom determinant did not converge at s0 = " + std::to_string(s0));
    return r.value;
}

}  // namespace twj
