#pragma once

#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <vector>

#include "twj/edge_scaling.hpp"
#include "twj/jacobi.hpp"
#include "twj/params.hpp"
#include "twj/quadrature.hpp"
#include "twj/special.hpp"

namespace twj {

struct FG {
    double f = 0;
    double g = 0;
};

inline FG f_g(double x, const LGParams& lg) {
    if (!(x > -1.0 && x < 1.0)) throw validation_error("f_g: x must lie in (-1, 1)");
    const TurningPoints tp = turning_points(lg);
    const double d = 1.0 - x * x;
    return {(x - tp.x_minus) * (x - tp.x_plus) / (4.0 * d * d), -(3.0 + x * x) / (4.0 * d * d)};
}

// The same f written with the expanded quartic numerator.
inline double f_expanded(double x, const LGParams& lg) {
    const double l2 = lg.lambda * lg.lambda, m2 = lg.mu * lg.mu;
    const double d = 1.0 - x * x;
    return (x * x + 2.0 * (l2 - m2) * x + 2.0 * l2 + 2.0 * m2 - 1.0) / (4.0 * d * d);
}

struct LGTransform {
    LGParams params;
    double x_plus = 0;
    double x_minus = 0;
    double zeta_dot_at_xplus = 0;
    double sigma_N = 0;
};

inline LGTransform make_lg_transform(const JacobiParams& j) {
    LGTransform t;
    t.params = lg_params(j);
    const TurningPoints tp = turning_points(angles_from_jacobi(j));
    t.x_plus = tp.x_plus;
    t.x_minus = tp.x_minus;
    const double d = 1.0 - t.x_plus * t.x_plus;
    t.zeta_dot_at_xplus = std::cbrt((t.x_plus - t.x_minus) / (4.0 * d * d));
    t.sigma_N = 1.0 / (std::cbrt(t.params.kappa * t.params.kappa) * t.zeta_dot_at_xplus);
    return t;
}

namespace lg_detail {

struct Consts {
    double s_hat, t_hat, s_bar, t_bar, delta, x_plus, x_minus;
};

inline Consts consts(const LGParams& lg) {
    const double cg = lg.lambda + lg.mu, cp = lg.lambda - lg.mu;
    const double sg = std::sqrt(1.0 - cg * cg), sp = std::sqrt(1.0 - cp * cp);
    const TurningPoints tp = turning_points(lg);
    return {2.0 * lg.mu, 2.0 * lg.lambda, 1.0 - cp * cg, 1.0 + cp * cg, 1.0 / (sp * sg), tp.x_plus, tp.x_minus};
}

}  // namespace lg_detail

// Closed-form 4 * integral of sqrt(f) from x_plus to x, for x in [x_plus, 1).
inline double four_I(double x, const LGParams& lg) {
    const auto c = lg_detail::consts(lg);
    if (!(x >= c.x_plus && x < 1.0)) throw validation_error("four_I: x must lie in [x_plus, 1)");
    const double s = 1.0 + x, t = 1.0 - x;
    const double R = std::sqrt((x - c.x_plus) * (x - c.x_minus));
    double r = 0;
    if (c.s_hat != 0) r -= c.s_hat * std::log(c.delta / s * (c.s_bar * s - c.s_hat * c.s_hat - c.s_hat * R));
    r -= c.s_bar * std::log(c.delta * (s - c.s_bar + R));
    if (c.t_hat != 0) r += c.t_hat * std::log(c.delta / t * (c.t_hat * R + c.t_hat * c.t_hat - c.t_bar * t));
    r += c.t_bar * std::log(c.delta * (c.t_bar - t - R));
    return r;
}

// Same integral by quadrature in sigma, where y = 1 - (1 - x_plus) exp(-sigma^2) removes both the
// square-root zero at x_plus and the logarithmic growth toward 1.
inline double four_I_quadrature(double x, const LGParams& lg) {
    const TurningPoints tp = turning_points(lg);
    if (!(x >= tp.x_plus && x < 1.0)) throw validation_error("four_I_quadrature: x outside [x_plus, 1)");
    if (x == tp.x_plus) return 0.0;
    const double d = 1.0 - tp.x_plus;
    const double S = std::sqrt(std::log(d) - std::log1p(-x));
    auto f = [&](double sg) {
        const double e = std::exp(-sg * sg);
        const double y = 1.0 - d * e;
        return 4.0 * sg * std::sqrt(d * -std::expm1(-sg * sg) * (y - tp.x_minus)) / (1.0 + y);
    };
    double sum = 0;
    const int panels = 1 + int(4 * S);
    for (int k = 0; k < panels; ++k) sum += quad::adaptive(f, S * k / panels, S * (k + 1) / panels, 1e-15, 20, 30).value;
    return sum;
}

inline double zeta(double x, const LGParams& lg) {
    const TurningPoints tp = turning_points(lg);
    const double x0 = 0.5 * (tp.x_plus + tp.x_minus);
    if (!(x > x0 && x < 1.0)) throw validation_error("zeta: x must lie in ((x_minus + x_plus)/2, 1)");
    // The closed form cancels to rounding level just above x_plus, where the 2/3 power amplifies it.
    if (x >= tp.x_plus) {
        const double I4 = x - tp.x_plus < 1e-2 * (1.0 - tp.x_plus) ? four_I_quadrature(x, lg) : four_I(x, lg);
        return std::cbrt(std::pow(1.5 * 0.25 * I4, 2));
    }
    const double V = std::sqrt(tp.x_plus - x);
    auto f = [&](double v) {
        const double y = tp.x_plus - v * v;
        return v * v * std::sqrt(y - tp.x_minus) / (1.0 - y * y);
    };
    const double J = quad::adaptive(f, 0.0, V, 1e-15, 32, 30).value;
    return -std::cbrt(std::pow(1.5 * J, 2));
}

// Constant term of the x -> 1 expansion for the parameter set alpha = a(N + 1/2), beta = b(N + 1/2).
inline double c0N(double a, double b) {
    if (!(a > 0) || !(b >= 0)) throw validation_error("c0N: need a > 0 and b >= 0");
    const double L = a * std::log(2.0 * a * a) + (1.0 + b) * std::log1p(b) - (1.0 + a) * std::log1p(a) -
                     (1.0 + a + b) * std::log(1.0 + a + b);
    return 2.0 / (2.0 + a + b) * L;
}

inline LGParams lg_params_ab(double a, double b) {
    const double k = 2.0 + a + b;
    return {std::numeric_limits<double>::quiet_NaN(), a / k, b / k};
}

// The same constant assembled from the four limiting logarithms.
inline double c0N_assembly(const LGParams& lg) {
    const auto c = lg_detail::consts(lg);
    const double T1 = 0.5 * c.delta * (2.0 * c.s_bar - c.s_hat * c.s_hat - c.s_hat * c.t_hat);
    const double T2 = c.delta * (c.t_bar + c.t_hat);
    const double T3 = 2.0 * c.delta * c.t_hat * c.t_hat;
    const double T4 = c.delta * (c.t_bar - c.t_hat);
    double r = -c.s_bar * std::log(T2) + c.t_bar * std::log(T4);
    if (c.s_hat != 0) r -= c.s_hat * std::log(T1);
    if (c.t_hat != 0) r += c.t_hat * std::log(T3);
    return r;
}

struct RateEntry {
    int N = 0;
    double sup_error = 0;
    double sup_deriv_error = 0;
    bool underflow = false;
};

struct RateReport {
    std::vector<int> N_values;
    std::vector<double> sup_errors;
    std::vector<double> ratios;   // error(N_k) / error(N_{k-1}), NaN for the first entry
    double fitted_exponent = std::numeric_limits<double>::quiet_NaN();

    static RateReport from(const std::vector<int>& Ns, const std::vector<double>& errs) {
        if (Ns.size() != errs.size() || Ns.empty()) throw validation_error("RateReport: mismatched inputs");
        RateReport r{Ns, errs, {}, std::numeric_limits<double>::quiet_NaN()};
        for (std::size_t i = 0; i < Ns.size(); ++i) {
            if (i > 0 && Ns[i] <= Ns[i - 1]) throw validation_error("RateReport: N values must increase");
            if (!(errs[i] > 0)) throw numerical_error("RateReport: sup errors must be positive");
            r.ratios.push_back(i == 0 ? std::numeric_limits<double>::quiet_NaN() : errs[i] / errs[i - 1]);
        }
        if (Ns.size() >= 2) {
            // least-squares slope of log error against log N
            double sx = 0, sy = 0, sxx = 0, sxy = 0;
            const double n = double(Ns.size());
            for (std::size_t i = 0; i < Ns.size(); ++i) {
                const double lx = std::log(double(Ns[i])), ly = std::log(errs[i]);
                sx += lx;
                sy += ly;
                sxx += lx * lx;
                sxy += lx * ly;
            }
            r.fitted_exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        }
        return r;
    }

    void write_csv(std::ostream& os) const {
        os << "N,sup_error,ratio\n" << std::setprecision(17);
        for (std::size_t i = 0; i < N_values.size(); ++i) {
            os << N_values[i] << ',' << sup_errors[i] << ',';
            if (i > 0) os << ratios[i];
            os << '\n';
        }
    }
};

inline std::vector<double> default_lg_grid(int N, int points = 301) {
    const double hi = std::min(4.0, std::pow(double(N), 1.0 / 6.0));
    std::vector<double> g(points);
    for (int i = 0; i < points; ++i) g[i] = -2.0 + (hi + 2.0) * i / (points - 1);
    return g;
}

enum class EdgeVariable { x, u };

// Weighted sup distance between the edge-scaled function and Ai, and between derivatives.
// On the u variable the abscissa is x = tanh(u_N + tau_N s).
inline RateEntry lg_airy_error(int N, double alpha, double beta, const std::vector<double>& s_grid,
                               EdgeVariable var = EdgeVariable::x) {
    const JacobiParams j(N, alpha, beta);
    const EdgeScaling xs = x_scale(j);
    const EdgeScaling us = u_scale(j);
    const double norm = -0.5 * std::log(j.kappa() * xs.scale);
    RateEntry r;
    r.N = N;
    for (double s : s_grid) {
        Point pt;
        double dxds = xs.scale;
        if (var == EdgeVariable::x) {
            const double x = xs.center + s * xs.scale;
            if (!(x > -1.0 && x < 1.0)) throw validation_error("lg_airy_error: grid maps outside (-1, 1)");
            pt = Point::at(x);
        } else {
            pt = Point::from_u(us.center + s * us.scale);
            dxds = us.scale * std::exp(pt.log1mx + pt.log1px);
        }
        const double x = pt.x;
        const OrthoEval e = ortho_eval(N, alpha, beta, pt);
        const double one_m = std::exp(pt.log1mx + pt.log1px);   // 1 - x^2
        const double sc = std::exp(e.log_scale + norm);
        const double val = std::sqrt(one_m) * e.phiN * sc;
        const double der = (std::sqrt(one_m) * e.dphiN - x / std::sqrt(one_m) * e.phiN) * sc * dxds;
        if (val == 0.0 && e.phiN != 0.0) r.underflow = true;
        const AiryValue a = airy(s);
        const double w = std::exp(0.5 * s);
        r.sup_error = std::max(r.sup_error, std::fabs(val - a.ai) * w);
        r.sup_deriv_error = std::max(r.sup_deriv_error, std::fabs(der - a.ai_prime) * w);
    }
    return r;
}

inline RateEntry lg_airy_error(int N, double alpha, double beta, EdgeVariable var = EdgeVariable::x) {
    return lg_airy_error(N, alpha, beta, default_lg_grid(N), var);
}

enum class KernelScaling { averaged, naive };

inline std::vector<double> default_kernel_grid(int points = 13) {
    std::vector<double> g(points);
    for (int i = 0; i < points; ++i) g[i] = -2.0 + 6.0 * i / (points - 1);
    return g;
}

// u-scale centering and scaling used for the kernel: precision-weighted degree N and N-1
// constants, or those of degree N alone.
inline std::pair<double, double> kernel_u_scaling(const JacobiParams& j, KernelScaling k) {
    const EdgeScaling a = u_scale(j);
    if (k == KernelScaling::naive) return {a.center, a.scale};
    const EdgeScaling b = u_scale(j.with_degree(j.N - 1));
    const double wa = 1.0 / a.scale, wb = 1.0 / b.scale;
    return {(wa * a.center + wb * b.center) / (wa + wb), 2.0 / (wa + wb)};
}

inline RateEntry kernel_edge_error(int N, double alpha, double beta, const std::vector<double>& grid,
                                   KernelScaling k = KernelScaling::averaged) {
    if (N < 2) throw validation_error("kernel_edge_error: N must be at least 2");
    for (double s : grid)
        if (s < -2.0 || s > 4.0) throw validation_error("kernel_edge_error: grid must lie in [-2, 4]");
    const JacobiParams j(N, alpha, beta);
    const auto [mu, sigma] = kernel_u_scaling(j, k);
    std::vector<Point> pts;
    std::vector<double> log_jac;   // log of sqrt(tau'(s))
    for (double s : grid) {
        const Point p = Point::from_u(mu + sigma * s);
        pts.push_back(p);
        log_jac.push_back(0.5 * (std::log(sigma) + p.log1mx + p.log1px));
    }
    RateEntry r;
    r.N = N;
    for (std::size_t a = 0; a < grid.size(); ++a)
        for (std::size_t b = a; b < grid.size(); ++b) {
            const double kn = kernel_cd(N, alpha, beta, pts[a], pts[b]) * std::exp(log_jac[a] + log_jac[b]);
            const double err = std::fabs(kn - airy_kernel(grid[a], grid[b])) * std::exp(0.25 * (grid[a] + grid[b]));
            r.sup_error = std::max(r.sup_error, err);
        }
    return r;
}

inline RateEntry kernel_edge_error(int N, double alpha, double beta, KernelScaling k = KernelScaling::averaged) {
    return kernel_edge_error(N, alpha, beta, default_kernel_grid(), k);
}

}  // namespace twj
