#pragma once

#include <array>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <memory>
#include <mutex>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/airy.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/numeric/odeint.hpp>

#include "twj/common.hpp"

namespace twj::detail {
using PIIReal = boost::multiprecision::number<
    boost::multiprecision::cpp_bin_float<113, boost::multiprecision::digit_base_2>, boost::multiprecision::et_off>;
}  // namespace twj::detail

namespace boost::numeric::odeint::detail {
template <>
struct extract_value_type<twj::detail::PIIReal, void> {
    using type = twj::detail::PIIReal;
};
}  // namespace boost::numeric::odeint::detail

namespace twj {

struct AiryValue {
    double s = 0;
    double ai = 0;
    double ai_prime = 0;
};

inline AiryValue airy(double s) {
    if (!std::isfinite(s)) throw validation_error("airy: argument must be finite");
    return {s, boost::math::airy_ai(s), boost::math::airy_ai_prime(s)};
}

inline double airy_kernel(double s, double t) {
    const double d = s - t;
    if (std::fabs(d) < 1e-4) {
        // Second-order expansion of the kernel about the midpoint.
        const double m = 0.5 * (s + t);
        const AiryValue a = airy(m);
        const double diag = a.ai_prime * a.ai_prime - m * a.ai * a.ai;
        const double c = a.ai * a.ai_prime / 3.0 - 2.0 * m * m * a.ai * a.ai / 3.0 +
                         2.0 * m * a.ai_prime * a.ai_prime / 3.0;
        return diag + 0.25 * d * d * c;
    }
    const AiryValue a = airy(s), b = airy(t);
    return (a.ai * b.ai_prime - b.ai * a.ai_prime) / d;
}

// Painleve II solution together with the running integrals that generate F1 and F2.
struct PainleveSolution {
    std::vector<double> s;
    std::vector<double> q;
    std::vector<double> dq;
    std::vector<double> int_q2;     // integral of q^2 over (s, inf)
    std::vector<double> int_xq2;    // integral of (x - s) q^2 over (s, inf)
    std::vector<double> int_q;      // integral of q over (s, inf)
};

namespace detail {

using PIIState = std::array<PIIReal, 5>;

struct PIISystem {
    void operator()(const PIIState& y, PIIState& dy, PIIReal x) const {
        dy[0] = y[1];
        dy[1] = x * y[0] + 2 * y[0] * y[0] * y[0];
        dy[2] = -y[0] * y[0];
        dy[3] = -y[2];
        dy[4] = -y[0];
    }
};

}  // namespace detail

// Integrates the Hastings-McLeod solution leftward from s_start > grid.back() (or equal).
// grid must be increasing. Throws numerical_error if the solution leaves the separatrix.
inline PainleveSolution solve_painleve(const std::vector<double>& grid, double s_start = 10.0,
                                       double rtol = 1e-24) {
    namespace ode = boost::numeric::odeint;
    if (grid.empty()) throw validation_error("hastings_mcleod: empty grid");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1])) throw validation_error("hastings_mcleod: grid must be increasing");
    if (s_start < grid.back()) s_start = grid.back();
    if (s_start < 8.0) throw validation_error("hastings_mcleod: integration must start at s >= 8");

    using R = detail::PIIReal;
    const R s0 = s_start;
    const R ai = boost::math::airy_ai(s0), aip = boost::math::airy_ai_prime(s0);
    // Exact Airy tail integrals at the starting point; the cubic correction is below 1e-30 there.
    const R v0 = aip * aip - s0 * ai * ai;
    const R u0 = (2 * s0 * s0 * ai * ai - 2 * s0 * aip * aip - ai * aip) / 3;
    const R w0 = boost::math::quadrature::gauss_kronrod<R, 61>::integrate(
        [](R x) { return boost::math::airy_ai(x); }, s0, s0 + 30, 15, R(1e-30));

    detail::PIIState y{ai, aip, v0, u0, w0};
    auto stepper = ode::make_controlled(R(1e-300), R(rtol), ode::runge_kutta_fehlberg78<detail::PIIState, R>());

    PainleveSolution out;
    const std::size_t n = grid.size();
    out.s = grid;
    out.q.resize(n);
    out.dq.resize(n);
    out.int_q2.resize(n);
    out.int_xq2.resize(n);
    out.int_q.resize(n);

    R x = s0;
    for (std::size_t k = n; k-- > 0;) {
        const R target = grid[k];
        if (target < x) {
            ode::integrate_adaptive(stepper, detail::PIISystem{}, y, x, target, R(-1e-3));
            x = target;
        }
        const double qk = static_cast<double>(y[0]);
        if (!(qk > 0) || !std::isfinite(qk))
            throw numerical_error("hastings_mcleod: solution left the separatrix near s = " +
                                  std::to_string(grid[k]));
        if (grid[k] < -4.0) {
            const double ratio = qk / std::sqrt(-0.5 * grid[k]);
            if (std::fabs(ratio - 1.0) > 0.15)
                throw numerical_error("hastings_mcleod: diverged from the sqrt(-s/2) asymptote at s = " +
                                      std::to_string(grid[k]));
        }
        out.q[k] = qk;
        out.dq[k] = static_cast<double>(y[1]);
        out.int_q2[k] = static_cast<double>(y[2]);
        out.int_xq2[k] = static_cast<double>(y[3]);
        out.int_q[k] = static_cast<double>(y[4]);
    }
    return out;
}

inline std::vector<double> hastings_mcleod(const std::vector<double>& grid) { return solve_painleve(grid).q; }

struct TWValue {
    double value = 0;
    bool approximate = false;
};

// Tabulated F1 and F2 on a uniform grid, with monotone cubic Hermite interpolation of log F.
class TWTable {
public:
    std::vector<double> s_grid;
    std::vector<double> q_values;
    std::vector<double> F1_values;
    std::vector<double> F2_values;

    static TWTable build(double lo = -10.0, double hi = 10.0, double step = 0.05) {
        if (!(hi > lo) || !(step > 0)) throw validation_error("TWTable: invalid grid");
        const int n = int(std::lround((hi - lo) / step)) + 1;
        std::vector<double> g(n);
        for (int i = 0; i < n; ++i) g[i] = lo + step * i;
        g.back() = hi;
        const PainleveSolution sol = solve_painleve(g, std::max(10.0, hi));
        TWTable t;
        t.s_grid = g;
        t.q_values = sol.q;
        t.F1_values.resize(n);
        t.F2_values.resize(n);
        for (int i = 0; i < n; ++i) {
            t.F2_values[i] = std::exp(-sol.int_xq2[i]);
            t.F1_values[i] = std::exp(-0.5 * (sol.int_xq2[i] + sol.int_q[i]));
        }
        t.finalize();
        return t;
    }

    double lo() const { return s_grid.front(); }
    double hi() const { return s_grid.back(); }

    TWValue cdf_ex(int beta, double s) const {
        check_beta(beta);
        const Channel& c = channel(beta);
        if (std::isnan(s)) throw validation_error("tw_cdf: s is NaN");
        if (s < lo()) return {std::exp(c.logF.front() + left_tail(beta, s) - left_tail(beta, lo())), true};
        if (s > hi()) {
            const double end = 1.0 - std::exp(c.logF.back());
            const double tail = right_tail(beta, s);
            return {1.0 - (end > 0 ? end * tail / right_tail(beta, hi()) : tail), true};
        }
        const double h = step_;
        std::size_t k = std::min<std::size_t>(std::size_t((s - lo()) / h), s_grid.size() - 2);
        while (k + 1 < s_grid.size() - 1 && s > s_grid[k + 1]) ++k;
        while (k > 0 && s < s_grid[k]) --k;
        const double hk = s_grid[k + 1] - s_grid[k];
        const double t = (s - s_grid[k]) / hk;
        const double t2 = t * t, t3 = t2 * t;
        const double y = (2 * t3 - 3 * t2 + 1) * c.logF[k] + (t3 - 2 * t2 + t) * hk * c.d[k] +
                         (-2 * t3 + 3 * t2) * c.logF[k + 1] + (t3 - t2) * hk * c.d[k + 1];
        return {std::exp(y), false};
    }

    double cdf(int beta, double s) const { return cdf_ex(beta, s).value; }

    // Upper tail 1 - F, kept accurate beyond the grid where F rounds to 1.
    TWValue sf_ex(int beta, double s) const {
        if (s > hi()) {
            const Channel& c = channel(beta);
            const double end = -std::expm1(c.logF.back());
            const double tail = right_tail(beta, s);
            return {end > 0 ? end * tail / right_tail(beta, hi()) : tail, true};
        }
        const TWValue v = cdf_ex(beta, s);
        return {1.0 - v.value, v.approximate};
    }

    double quantile(int beta, double prob) const {
        check_beta(beta);
        if (!(prob > 0.0 && prob < 1.0)) throw validation_error("tw_quantile: probability must lie in (0, 1)");
        double a = lo(), b = hi();
        if (cdf(beta, a) > prob) a = -60.0;
        if (cdf(beta, b) < prob) b = 60.0;
        for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, std::fabs(a)); ++it) {
            const double mid = 0.5 * (a + b);
            (cdf(beta, mid) < prob ? a : b) = mid;
        }
        return 0.5 * (a + b);
    }

    void write_csv(std::ostream& os) const {
        os << "s,q,F1,F2\n" << std::setprecision(17);
        for (std::size_t i = 0; i < s_grid.size(); ++i)
            os << s_grid[i] << ',' << q_values[i] << ',' << F1_values[i] << ',' << F2_values[i] << '\n';
    }

    static TWTable read_csv(std::istream& is) {
        std::string line;
        if (!std::getline(is, line) || line.rfind("s,q,F1,F2", 0) != 0)
            throw validation_error("TWTable: cache header must be s,q,F1,F2");
        TWTable t;
        while (std::getline(is, line)) {
            if (line.empty()) continue;
            std::istringstream ls(line);
            std::array<double, 4> v{};
            char comma = 0;
            ls >> v[0] >> comma >> v[1] >> comma >> v[2] >> comma >> v[3];
            if (!ls) throw validation_error("TWTable: malformed cache row: " + line);
            t.s_grid.push_back(v[0]);
            t.q_values.push_back(v[1]);
            t.F1_values.push_back(v[2]);
            t.F2_values.push_back(v[3]);
        }
        if (t.s_grid.size() < 8) throw validation_error("TWTable: cache has too few rows");
        t.finalize();
        return t;
    }

    // Rebuilds interpolation data from the tabulated values.
    void finalize() {
        step_ = (s_grid.back() - s_grid.front()) / double(s_grid.size() - 1);
        build_channel(F1_values, ch1_);
        build_channel(F2_values, ch2_);
    }

private:
    struct Channel {
        std::vector<double> logF;
        std::vector<double> d;
    };
    Channel ch1_, ch2_;
    double step_ = 0.05;

    static void check_beta(int beta) {
        if (beta != 1 && beta != 2) throw validation_error("Tracy-Widom beta must be 1 or 2");
    }
    const Channel& channel(int beta) const { return beta == 1 ? ch1_ : ch2_; }

    static double left_tail(int beta, double s) {
        const double a = std::fabs(s);
        if (beta == 2) return -a * a * a / 12.0 - std::log(a) / 8.0;
        return -a * a * a / 24.0 - std::pow(a, 1.5) / (3.0 * std::numbers::sqrt2) - std::log(a) / 16.0;
    }
    static double right_tail(int beta, double s) {
        const double r = std::pow(s, 1.5);
        if (beta == 2) return std::exp(-4.0 * r / 3.0) / (16.0 * std::numbers::pi * r);
        return std::exp(-2.0 * r / 3.0) / (4.0 * std::sqrt(std::numbers::pi) * r);
    }

    // Derivative weights of the Lagrange interpolant through integer offsets `nodes`, at 0.
    static std::array<double, 7> fd_weights(const std::array<int, 7>& nodes) {
        std::array<double, 7> w{};
        for (int j = 0; j < 7; ++j) {
            double denom = 1;
            for (int l = 0; l < 7; ++l)
                if (l != j) denom *= nodes[j] - nodes[l];
            double num = 0;
            for (int k = 0; k < 7; ++k) {
                if (k == j) continue;
                double prod = 1;
                for (int l = 0; l < 7; ++l)
                    if (l != j && l != k) prod *= -nodes[l];
                num += prod;
            }
            w[j] = num / denom;
        }
        return w;
    }

    void build_channel(const std::vector<double>& F, Channel& c) const {
        const std::size_t n = F.size();
        c.logF.resize(n);
        c.d.assign(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            if (!(F[i] > 0 && F[i] <= 1)) throw numerical_error("TWTable: CDF value outside (0, 1]");
            if (i > 0 && F[i] < F[i - 1]) throw numerical_error("TWTable: CDF values are not monotone");
            c.logF[i] = std::log(F[i]);
        }
        for (std::size_t i = 0; i < n; ++i) {
            const int start = int(std::clamp<std::ptrdiff_t>(std::ptrdiff_t(i) - 3, 0, std::ptrdiff_t(n) - 7));
            std::array<int, 7> nodes{};
            for (int k = 0; k < 7; ++k) nodes[k] = start + k - int(i);
            const auto w = fd_weights(nodes);
            double d = 0;
            for (int k = 0; k < 7; ++k) d += w[k] * c.logF[start + k];
            c.d[i] = std::max(0.0, d / step_);
        }
        // Fritsch-Carlson limiter keeps every cell monotone.
        for (std::size_t k = 0; k + 1 < n; ++k) {
            const double delta = (c.logF[k + 1] - c.logF[k]) / (s_grid[k + 1] - s_grid[k]);
            if (delta == 0.0) {
                c.d[k] = c.d[k + 1] = 0.0;
                continue;
            }
            const double a = c.d[k] / delta, b = c.d[k + 1] / delta;
            const double r = a * a + b * b;
            if (r > 9.0) {
                const double tau = 3.0 / std::sqrt(r);
                c.d[k] = tau * a * delta;
                c.d[k + 1] = tau * b * delta;
            }
        }
    }
};

namespace detail {
inline std::mutex& tw_mutex() {
    static std::mutex m;
    return m;
}
inline std::shared_ptr<const TWTable>& tw_slot() {
    static std::shared_ptr<const TWTable> t;
    return t;
}
}  // namespace detail

// Replaces the process-wide table (used by the CLI to install a cached copy).
inline void install_tw_table(std::shared_ptr<const TWTable> t) {
    std::lock_guard<std::mutex> lock(detail::tw_mutex());
    // References handed out earlier stay valid: retired tables are kept alive.
    static std::vector<std::shared_ptr<const TWTable>> retired;
    if (detail::tw_slot()) retired.push_back(detail::tw_slot());
    detail::tw_slot() = std::move(t);
}

inline const TWTable& tw_table() {
    std::lock_guard<std::mutex> lock(detail::tw_mutex());
    auto& slot = detail::tw_slot();
    if (!slot) slot = std::make_shared<const TWTable>(TWTable::build());
    return *slot;
}

inline double tw_cdf(int beta, double s) { return tw_table().cdf(beta, s); }
inline TWValue tw_cdf_ex(int beta, double s) { return tw_table().cdf_ex(beta, s); }
inline TWValue tw_sf_ex(int beta, double s) { return tw_table().sf_ex(beta, s); }
inline double tw_quantile(int beta, double prob) { return tw_table().quantile(beta, prob); }

}  // namespace twj
