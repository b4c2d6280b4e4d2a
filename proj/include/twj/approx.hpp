#pragma once

#include <cmath>
#include <numbers>
#include <string>

#include "twj/edge_scaling.hpp"
#include "twj/params.hpp"
#include "twj/quadrature.hpp"
#include "twj/special.hpp"

namespace twj {

inline int tw_beta(Ensemble e) { return e == Ensemble::real ? 1 : 2; }

struct TestResult {
    double statistic_theta = 0;
    double s_value = 0;
    double p_value = 0;
    EdgeScaling scaling;
    Caveats caveats;
};

namespace approx_detail {
inline void check_theta(double theta) {
    if (!(theta > 0.0 && theta < 1.0))
        throw validation_error("theta must lie strictly inside (0, 1); the logit is infinite at the endpoints");
}
}  // namespace approx_detail

inline double greatest_root_s(const StatParams& s, double theta, Ensemble e, EdgeScaling* used = nullptr) {
    approx_detail::check_theta(theta);
    const EdgeScaling sc = logit_scaling(s, e);
    if (used) *used = sc;
    return (logit(theta) - sc.center) / sc.scale;
}

inline double greatest_root_cdf(const StatParams& s, double theta, Ensemble e = Ensemble::real) {
    return tw_cdf(tw_beta(e), greatest_root_s(s, theta, e));
}

inline TestResult greatest_root_pvalue(const StatParams& s, double theta, Ensemble e = Ensemble::real) {
    TestResult r;
    r.statistic_theta = theta;
    r.s_value = greatest_root_s(s, theta, e, &r.scaling);
    const TWValue F = tw_sf_ex(tw_beta(e), r.s_value);
    r.p_value = F.value;
    r.caveats = r.scaling.caveats;
    if (s.at_boundary()) add_caveat(r.caveats, caveat::boundary_m_eq_p);
    if (F.approximate) add_caveat(r.caveats, caveat::extrapolated);
    return r;
}

inline double greatest_root_quantile(const StatParams& s, double prob, Ensemble e = Ensemble::real) {
    const EdgeScaling sc = logit_scaling(s, e);
    return logistic(sc.center + sc.scale * tw_quantile(tw_beta(e), prob));
}

inline double smallest_root_cdf(const StatParams& s, double theta, Ensemble e = Ensemble::real) {
    approx_detail::check_theta(theta);
    const EdgeScaling sc = smallest_root_scaling(s, e);
    return 1.0 - tw_cdf(tw_beta(e), (sc.center - logit(theta)) / sc.scale);
}

// Statistical settings mapped to (p, m, n).
inline StatParams from_cca(int p, int q, int n, bool mean_corrected) {
    const int np = mean_corrected ? n - 1 : n;
    if (np - q < p)
        throw validation_error("CCA: need n' - q >= p (n' = n - 1 when mean-corrected); got n'=" +
                               std::to_string(np) + ", q=" + std::to_string(q) + ", p=" + std::to_string(p));
    return StatParams(p, np - q, q);
}

inline StatParams from_mlm(int r, int g, int q, int n) {
    if (n - q < r)
        throw validation_error("multivariate linear model: need n - q >= r; got n=" + std::to_string(n) +
                               ", q=" + std::to_string(q) + ", r=" + std::to_string(r));
    return StatParams(r, n - q, g);
}

inline StatParams from_cov_equal(int p, int n1, int n2) {
    if (n1 < p) throw validation_error("covariance equality: need n1 >= p");
    return StatParams(p, n1, n2);
}

inline StatParams from_discrim(int p, int g, int n) {
    if (g < 2) throw validation_error("discriminant analysis: need at least g = 2 groups");
    if (n - g < p) throw validation_error("discriminant analysis: need n - g >= p");
    return StatParams(p, n - g, g - 1);
}

struct WachterDensity {
    double theta_minus = 0;
    double theta_plus = 1;
    double normalization = 1;   // multiplies the unnormalized profile
    Caveats caveats;
};

namespace approx_detail {
inline double wachter_profile(const WachterDensity& d, double th) {
    if (th <= d.theta_minus || th >= d.theta_plus) return 0.0;
    return std::sqrt((d.theta_plus - th) * (th - d.theta_minus)) / (th * (1.0 - th));
}

// Integral of the unnormalized profile from theta_minus to x, via th = lo + (hi-lo) sin^2(t).
inline double wachter_mass(const WachterDensity& d, double x) {
    if (x <= d.theta_minus) return 0.0;
    const double lo = d.theta_minus, w = d.theta_plus - lo;
    const double T = x >= d.theta_plus ? 0.5 * std::numbers::pi : std::asin(std::sqrt((x - lo) / w));
    auto f = [&](double t) {
        const double sn = std::sin(t), cs = std::cos(t);
        const double th = lo + w * sn * sn;
        // sqrt((hi - th)(th - lo)) dth = w^2 sin^2 cos^2 * 2 dt
        return 2.0 * w * w * sn * sn * cs * cs / (th * (1.0 - th));
    };
    return quad::gl_composite(f, 0.0, T, 8, 40);
}
}  // namespace approx_detail

inline WachterDensity wachter(const StatParams& s) {
    const Angles a = angles_from_stat(s);
    WachterDensity d;
    const double hm = std::sin(0.5 * (a.phi - a.gamma)), hp = std::sin(0.5 * (a.phi + a.gamma));
    d.theta_minus = hm * hm;
    d.theta_plus = hp * hp;
    d.normalization = 1.0 / approx_detail::wachter_mass(d, 1.0);
    if (s.p > s.n) add_caveat(d.caveats, caveat::p_exceeds_n);
    return d;
}

inline double wachter_eval(const WachterDensity& d, double theta) {
    return d.normalization * approx_detail::wachter_profile(d, theta);
}

inline double wachter_cdf(const WachterDensity& d, double theta) {
    if (theta <= d.theta_minus) return 0.0;
    if (theta >= d.theta_plus) return 1.0;
    return d.normalization * approx_detail::wachter_mass(d, theta);
}

inline double wachter_mean(const WachterDensity& d) {
    const double lo = d.theta_minus, w = d.theta_plus - lo;
    auto f = [&](double t) {
        const double sn = std::sin(t), cs = std::cos(t);
        const double th = lo + w * sn * sn;
        return 2.0 * w * w * sn * sn * cs * cs / (1.0 - th);
    };
    return d.normalization * quad::gl_composite(f, 0.0, 0.5 * std::numbers::pi, 8, 40);
}

}  // namespace twj
