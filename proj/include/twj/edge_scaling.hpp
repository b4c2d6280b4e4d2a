#pragma once

#include <cmath>
#include <string>

#include "twj/jacobi.hpp"
#include "twj/params.hpp"

namespace twj {

enum class ScaleKind { x, u, logit, theta };

inline const char* to_string(ScaleKind k) {
    switch (k) {
        case ScaleKind::x: return "x";
        case ScaleKind::u: return "u";
        case ScaleKind::logit: return "logit";
        case ScaleKind::theta: return "theta";
    }
    return "?";
}

struct EdgeScaling {
    double center = 0;
    double scale = 1;
    ScaleKind kind = ScaleKind::logit;
    Ensemble ensemble = Ensemble::real;
    bool reflected = false;
    Caveats caveats;
};

namespace edge_detail {
inline void require_soft_edge(const JacobiParams& j) {
    if (j.hard_edge())
        throw validation_error(
            "alpha = 0 (m == p): the upper turning point sits at the hard edge x = 1, where the soft-edge "
            "centering is infinite");
}
inline void annotate(const StatParams& s, Ensemble e, EdgeScaling& r) {
    if (e == Ensemble::real && s.p % 2 == 1) add_caveat(r.caveats, caveat::odd_p);
}
}  // namespace edge_detail

inline EdgeScaling x_scale(const JacobiParams& j) {
    edge_detail::require_soft_edge(j);
    const Angles a = angles_from_jacobi(j);
    return {-std::cos(a.phi + a.gamma), sigma_x(j), ScaleKind::x, j.ensemble, false, {}};
}

inline EdgeScaling u_scale(const JacobiParams& j) {
    edge_detail::require_soft_edge(j);
    const Angles a = angles_from_jacobi(j);
    const double t = a.phi + a.gamma;
    const double s = std::sin(t);
    return {std::log(std::tan(0.5 * t)), sigma_x(j) / (s * s), ScaleKind::u, j.ensemble, false, {}};
}

inline EdgeScaling real_logit_scaling(const StatParams& s) {
    const EdgeScaling u = u_scale(to_jacobi(s, Ensemble::real));
    EdgeScaling r{2.0 * u.center, 2.0 * u.scale, ScaleKind::logit, Ensemble::real, false, {}};
    edge_detail::annotate(s, Ensemble::real, r);
    return r;
}

// Precision-weighted average of the degree N and N-1 u-scale constants, on the logit scale.
inline EdgeScaling complex_logit_scaling(const StatParams& s) {
    const JacobiParams j = to_jacobi(s, Ensemble::complex);
    if (j.N < 2)
        throw validation_error("complex ensemble needs min(p, n) >= 2: the degree N-1 constants are undefined at N = 1");
    const EdgeScaling a = u_scale(j), b = u_scale(j.with_degree(j.N - 1));
    const double wa = 1.0 / a.scale, wb = 1.0 / b.scale;
    const double center = (wa * a.center + wb * b.center) / (wa + wb);
    const double scale = 2.0 / (wa + wb);
    return {2.0 * center, 2.0 * scale, ScaleKind::logit, Ensemble::complex, false, {}};
}

inline EdgeScaling logit_scaling(const StatParams& s, Ensemble e) {
    return e == Ensemble::real ? real_logit_scaling(s) : complex_logit_scaling(s);
}

inline EdgeScaling theta_scaling(const StatParams& s, Ensemble e = Ensemble::real) {
    EdgeScaling r = logit_scaling(s, e);
    const double c = logistic(r.center);
    r.scale = c * (1.0 - c) * r.scale;
    r.center = c;
    r.kind = ScaleKind::theta;
    return r;
}

// Logit-scale constants for the smallest root, obtained by exchanging m and n.
inline EdgeScaling smallest_root_scaling(const StatParams& s, Ensemble e = Ensemble::real) {
    if (s.n < s.p)
        throw validation_error("smallest root: n >= p is required (otherwise the smallest root is exactly 0)");
    EdgeScaling r = logit_scaling(StatParams(s.p, s.n, s.m), e);
    r.center = -r.center;
    r.reflected = true;
    r.caveats.clear();
    edge_detail::annotate(s, e, r);
    return r;
}

struct DegreeStepDiagnostics {
    double delta_N = 0;      // (u_N - u_{N-1}) / tau_{N-1}
    double sigma_ratio = 0;  // sigma_N / sigma_{N-1}
    double tau_ratio = 0;    // tau_N / tau_{N-1}
    double u_diff = 0;       // u_N - u_{N-1}
};

inline DegreeStepDiagnostics degree_step_diagnostics(const JacobiParams& j) {
    if (j.N < 2) throw validation_error("degree_step_diagnostics: N must be at least 2");
    const JacobiParams jm = j.with_degree(j.N - 1);
    const EdgeScaling uN = u_scale(j), uM = u_scale(jm);
    const EdgeScaling xN = x_scale(j), xM = x_scale(jm);
    return {(uN.center - uM.center) / uM.scale, xN.scale / xM.scale, uN.scale / uM.scale, uN.center - uM.center};
}

// sigma^2 (kappa_N - 1) a_N sqrt(sigma_N sigma_{N-1} kappa_N kappa_{N-1}): sigma is a u-scale width,
// sigma_N and sigma_{N-1} are the x-scale widths at the two degrees.
inline double e_N(const JacobiParams& j, double sigma) {
    if (j.N < 2) throw validation_error("e_N: N must be at least 2");
    const JacobiParams jm = j.with_degree(j.N - 1);
    const double kN = j.kappa(), kM = jm.kappa();
    const double aN = recurrence_a(j.N, j.alpha, j.beta);
    return sigma * sigma * (kN - 1.0) * aN * std::sqrt(x_scale(j).scale * x_scale(jm).scale * kN * kM);
}

}  // namespace twj
