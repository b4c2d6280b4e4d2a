#pragma once

#include <cmath>
#include <limits>
#include <numbers>

#include "twj/params.hpp"
#include "twj/quadrature.hpp"

namespace twj {

struct PolyValue {
    double log_magnitude = -std::numeric_limits<double>::infinity();
    int sign = 0;

    double value() const { return sign == 0 ? 0.0 : sign * std::exp(log_magnitude); }
    // True when the value is nonzero but too small for a double.
    bool underflows() const { return sign != 0 && value() == 0.0; }
};

struct NormConstants {
    double log_h = 0;   // log of the squared L2 norm of P_N
    double log_l = 0;   // log of the leading coefficient of P_N
    double a_N = 0;     // off-diagonal recurrence coefficient of the orthonormal family
};

// A point of (-1, 1) carried with accurate logs of its distances to the endpoints.
struct Point {
    double x = 0;
    double log1mx = 0;
    double log1px = 0;

    static Point at(double x) { return {x, std::log1p(-x), std::log1p(x)}; }

    // x = tanh(u), without cancellation for large |u|.
    static Point from_u(double u) {
        auto softplus = [](double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); };
        return {std::tanh(u), std::numbers::ln2 - softplus(2 * u), std::numbers::ln2 - softplus(-2 * u)};
    }
};

namespace jacobi_detail {

inline long double log_h(int k, long double a, long double b) {
    return (a + b + 1) * std::numbers::ln2_v<long double> - std::log(2 * k + a + b + 1) +
           std::lgamma(k + a + 1) + std::lgamma(k + b + 1) - std::lgamma((long double)k + 1) -
           std::lgamma(k + a + b + 1);
}

inline double rec_a(int k, double a, double b) {
    if (k <= 0) return 0.0;
    const double s = 2.0 * k + a + b;
    return 2.0 / s * std::sqrt(k * (k + a) * (k + b) * (k + a + b) / ((s - 1.0) * (s + 1.0)));
}

inline double rec_b(int k, double a, double b) {
    if (k == 0) return (b - a) / (a + b + 2.0);
    const double s = 2.0 * k + a + b;
    return (b * b - a * a) / (s * (s + 2.0));
}

}  // namespace jacobi_detail

// Orthonormal functions of degrees N and N-1 and their x-derivatives, sharing one scale:
// phi_j = mant_j * exp(log_scale). With `weighted` false the weight factor is omitted
// (giving the orthonormal polynomials themselves).
struct OrthoEval {
    double log_scale = 0;
    double phiN = 0, phiNm1 = 0;
    double dphiN = 0, dphiNm1 = 0;

    double valueN() const { return phiN * std::exp(log_scale); }
    double valueNm1() const { return phiNm1 * std::exp(log_scale); }
    double derivN() const { return dphiN * std::exp(log_scale); }
    double derivNm1() const { return dphiNm1 * std::exp(log_scale); }
};

inline OrthoEval ortho_eval(int N, double alpha, double beta, const Point& pt, bool weighted = true) {
    using namespace jacobi_detail;
    const double x = pt.x;
    double p0 = 0, p1 = 1, d0 = 0, d1 = 0;   // degrees k-1 and k, mantissas
    double E = 0;
    for (int k = 0; k < N; ++k) {
        const double ak = rec_a(k, alpha, beta), ak1 = rec_a(k + 1, alpha, beta), bk = rec_b(k, alpha, beta);
        const double p2 = ((x - bk) * p1 - ak * p0) / ak1;
        const double d2 = ((x - bk) * d1 + p1 - ak * d0) / ak1;
        p0 = p1;
        p1 = p2;
        d0 = d1;
        d1 = d2;
        const double mag = std::max({std::fabs(p0), std::fabs(p1), std::fabs(d0), std::fabs(d1)});
        if (mag > 1e150 || (mag < 1e-150 && mag > 0)) {
            const int e = std::ilogb(mag);
            p0 = std::scalbn(p0, -e);
            p1 = std::scalbn(p1, -e);
            d0 = std::scalbn(d0, -e);
            d1 = std::scalbn(d1, -e);
            E += e * std::numbers::ln2;
        }
    }
    OrthoEval r;
    double logw = 0;
    if (weighted) {
        const double la = alpha == 0 ? 0.0 : alpha * pt.log1mx;
        const double lb = beta == 0 ? 0.0 : beta * pt.log1px;
        logw = 0.5 * (la + lb);
    }
    r.log_scale = E + logw - 0.5 * double(log_h(0, alpha, beta));
    r.phiN = p1;
    r.phiNm1 = N > 0 ? p0 : 0.0;
    if (weighted) {
        // d/dx of w^{1/2} divided by w^{1/2}
        const double g = 0.5 * beta / (1 + x) - 0.5 * alpha / (1 - x);
        r.dphiN = d1 + g * p1;
        r.dphiNm1 = N > 0 ? d0 + g * p0 : 0.0;
    } else {
        r.dphiN = d1;
        r.dphiNm1 = N > 0 ? d0 : 0.0;
    }
    return r;
}

inline NormConstants norms(int N, double alpha, double beta) {
    if (N < 0) throw validation_error("norms: degree must be nonnegative");
    const long double a = alpha, b = beta;
    NormConstants c;
    c.log_h = double(jacobi_detail::log_h(N, a, b));
    c.log_l = double(-N * std::numbers::ln2_v<long double> + std::lgamma(2 * N + a + b + 1) -
                     std::lgamma((long double)N + 1) - std::lgamma(N + a + b + 1));
    c.a_N = jacobi_detail::rec_a(N, alpha, beta);
    return c;
}

inline double recurrence_a(int N, double alpha, double beta) { return jacobi_detail::rec_a(N, alpha, beta); }

inline PolyValue to_poly_value(double mant, double log_scale) {
    if (mant == 0.0 || log_scale == -std::numeric_limits<double>::infinity()) return {};
    return {std::log(std::fabs(mant)) + log_scale, mant > 0 ? 1 : -1};
}

// P_N^{(alpha, beta)}(x) in the usual normalization.
inline PolyValue eval_P(int N, double alpha, double beta, double x) {
    if (!(x >= -1.0 && x <= 1.0)) throw validation_error("eval_P: x must lie in [-1, 1]");
    const OrthoEval e = ortho_eval(N, alpha, beta, Point::at(x), false);
    return to_poly_value(e.phiN, e.log_scale + 0.5 * norms(N, alpha, beta).log_h);
}

inline PolyValue phi_log(int k, double alpha, double beta, const Point& pt) {
    const OrthoEval e = ortho_eval(k, alpha, beta, pt);
    return to_poly_value(e.phiN, e.log_scale);
}

inline double phi(int k, double alpha, double beta, double x) {
    if (!(x >= -1.0 && x <= 1.0)) throw validation_error("phi: x must lie in [-1, 1]");
    return phi_log(k, alpha, beta, Point::at(x)).value();
}

// phi_N times sqrt(1 - x^2), normalized by the x-scale edge constants.
inline double phi_check(int N, double alpha, double beta, double x) {
    if (!(x > -1.0 && x < 1.0)) throw validation_error("phi_check: x must lie in (-1, 1)");
    const JacobiParams j(N, alpha, beta);
    const Point pt = Point::at(x);
    const PolyValue v = phi_log(N, alpha, beta, pt);
    if (v.sign == 0) return 0.0;
    return v.sign * std::exp(v.log_magnitude + 0.5 * (pt.log1mx + pt.log1px) -
                             0.5 * std::log(j.kappa() * sigma_x(j)));
}

inline double phi_tilde(int N, double alpha, double beta, const Point& pt) {
    const PolyValue v = phi_log(N, alpha, beta, pt);
    if (v.sign == 0) return 0.0;
    return v.sign * std::exp(v.log_magnitude - 0.5 * (pt.log1mx + pt.log1px));
}

inline double phi_tilde(int N, double alpha, double beta, double x) {
    if (!(x > -1.0 && x < 1.0)) throw validation_error("phi_tilde: x must lie in (-1, 1)");
    return phi_tilde(N, alpha, beta, Point::at(x));
}

inline double w_fn(int N, double alpha, double beta, double x) {
    if (!(x >= -1.0 && x <= 1.0)) throw validation_error("w_fn: x must lie in [-1, 1]");
    const PolyValue p = eval_P(N, alpha, beta, x);
    if (p.sign == 0 || x == 1.0 || x == -1.0) return 0.0;
    return p.sign * std::exp(p.log_magnitude + 0.5 * (alpha + 1) * std::log1p(-x) +
                             0.5 * (beta + 1) * std::log1p(x));
}

// Christoffel-Darboux kernel in points carrying endpoint logs.
inline double kernel_cd(int N, double alpha, double beta, const Point& x, const Point& y) {
    if (N < 1) throw validation_error("kernel_cd: N must be at least 1");
    const double aN = recurrence_a(N, alpha, beta);
    const double d = x.x - y.x;
    if (std::fabs(d) < 1e-6) {
        const Point m = std::fabs(d) == 0 ? x : Point::at(0.5 * (x.x + y.x));
        const OrthoEval e = ortho_eval(N, alpha, beta, m);
        return aN * (e.dphiN * e.phiNm1 - e.dphiNm1 * e.phiN) * std::exp(2 * e.log_scale);
    }
    const OrthoEval ex = ortho_eval(N, alpha, beta, x), ey = ortho_eval(N, alpha, beta, y);
    return aN * (ex.phiN * ey.phiNm1 - ex.phiNm1 * ey.phiN) / d * std::exp(ex.log_scale + ey.log_scale);
}

inline double kernel_cd(int N, double alpha, double beta, double x, double y) {
    if (!(x > -1.0 && x < 1.0 && y > -1.0 && y < 1.0))
        throw validation_error("kernel_cd: arguments must lie in (-1, 1)");
    return kernel_cd(N, alpha, beta, Point::at(x), Point::at(y));
}

struct KernelRepCheck {
    double integral_form = 0;
    double direct_form = 0;
    double residual = 0;
    double tail = 0;
    bool converged = true;
};

namespace jacobi_detail {
inline double log_cosh(double u) {
    const double a = std::fabs(u);
    return a + std::log1p(std::exp(-2 * a)) - std::numbers::ln2;
}
}  // namespace jacobi_detail

// Compares the semi-infinite integral representation of the kernel in the u = atanh x
// variable with the Christoffel-Darboux form.
inline KernelRepCheck kernel_integral_rep_check(int N, double alpha, double beta, double u, double v) {
    if (N < 2) throw validation_error("kernel_integral_rep_check: N must be at least 2");
    using jacobi_detail::log_cosh;
    const double aN = recurrence_a(N, alpha, beta);
    const double kappa = 2.0 * N + alpha + beta + 1.0;

    KernelRepCheck r;
    r.direct_form = kernel_cd(N, alpha, beta, Point::from_u(u), Point::from_u(v)) *
                    std::exp(-log_cosh(u) - log_cosh(v));

    auto integrand = [&](double w) {
        const OrthoEval a = ortho_eval(N, alpha, beta, Point::from_u(u + w));
        const OrthoEval b = ortho_eval(N, alpha, beta, Point::from_u(v + w));
        const double scale = a.log_scale + b.log_scale - log_cosh(u + w) - log_cosh(v + w);
        return (a.phiN * b.phiNm1 + a.phiNm1 * b.phiN) * std::exp(scale);
    };
    const double W = 40.0 / std::cbrt(double(N));
    const int panels = 64;
    double sum = 0;
    for (int k = 0; k < panels; ++k) {
        const auto q = quad::adaptive(integrand, W * k / panels, W * (k + 1) / panels, 1e-14, 20, 20);
        sum += q.value;
        r.converged = r.converged && q.converged;
    }
    r.integral_form = 0.5 * (kappa - 1.0) * aN * sum;
    r.tail = std::fabs(integrand(W));
    if (r.tail > 1e-12) r.converged = false;
    r.residual = std::fabs(r.integral_form - r.direct_form);
    return r;
}

// Integral of phi_N / sqrt(1 - x^2) over (-1, 1), evaluated in u = atanh x where the
// endpoint behaviour becomes exponential decay.
inline double integral_phi_tilde(int N, double alpha, double beta) {
    if ((alpha - 1.0) / 2.0 <= -1.0 || (beta - 1.0) / 2.0 <= -1.0)
        throw validation_error("integral_phi_tilde: endpoint singularity is not integrable");
    auto f = [&](double u) {
        const PolyValue v = phi_log(N, alpha, beta, Point::from_u(u));
        if (v.sign == 0) return 0.0;
        return v.sign * std::exp(v.log_magnitude - jacobi_detail::log_cosh(u));
    };
    const double U = 40.0;
    const int panels = 160;
    double sum = 0;
    bool ok = true;
    for (int k = 0; k < panels; ++k) {
        const double a = -U + 2 * U * k / panels, b = -U + 2 * U * (k + 1) / panels;
        const auto q = quad::adaptive(f, a, b, 1e-14, 20, 25);
        sum += q.value;
        ok = ok && q.converged;
    }
    if (!ok) throw numerical_error("integral_phi_tilde: quadrature did not converge");
    return sum;
}

}  // namespace twj
