#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <utility>
#include <vector>

namespace twj::quad {

struct Rule {
    std::vector<double> x;
    std::vector<double> w;
};

// Gauss-Legendre rule on [-1, 1] by Newton iteration on P_n.
inline Rule compute_gauss_legendre(int n) {
    Rule r;
    r.x.resize(n);
    r.w.resize(n);
    auto legendre = [n](long double z, long double& dp) {
        long double p0 = 1, p1 = z;
        for (int k = 2; k <= n; ++k) {
            long double p2 = ((2 * k - 1) * z * p1 - (k - 1) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (z * p1 - p0) / (z * z - 1);
        return p1;
    };
    for (int i = 0; i < (n + 1) / 2; ++i) {
        long double z = std::cos(std::numbers::pi_v<long double> * (i + 0.75L) / (n + 0.5L));
        long double dp = 0;
        for (int it = 0; it < 100; ++it) {
            const long double dz = legendre(z, dp) / dp;
            z -= dz;
            if (std::fabs(dz) < 1e-19L) break;
        }
        legendre(z, dp);
        const long double w = 2 / ((1 - z * z) * dp * dp);
        r.x[i] = double(-z);
        r.x[n - 1 - i] = double(z);
        r.w[i] = r.w[n - 1 - i] = double(w);
    }
    if (n % 2 == 1) r.x[n / 2] = 0.0;
    return r;
}

inline const Rule& gauss_legendre(int n) {
    static std::mutex mu;
    static std::map<int, Rule> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, compute_gauss_legendre(n)).first;
    return it->second;
}

template <class F>
double gl(F&& f, double a, double b, int n) {
    const Rule& r = gauss_legendre(n);
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double s = 0;
    for (int i = 0; i < n; ++i) s += r.w[i] * f(c + h * r.x[i]);
    return s * h;
}

// Composite Gauss-Legendre over equal panels.
template <class F>
double gl_composite(F&& f, double a, double b, int panels, int n) {
    double s = 0;
    const double h = (b - a) / panels;
    for (int k = 0; k < panels; ++k) s += gl(f, a + k * h, a + (k + 1) * h, n);
    return s;
}

namespace detail {
template <class F>
double adaptive_gl(F& f, double a, double b, double whole, double tol, int depth, int n, bool& ok) {
    const double m = 0.5 * (a + b);
    const double left = gl(f, a, m, n), right = gl(f, m, b, n);
    const double err = std::fabs(left + right - whole);
    // Differences at the rounding level of the cell cannot be resolved further.
    const double floor = 8 * std::numeric_limits<double>::epsilon() * (std::fabs(left) + std::fabs(right));
    if (err <= tol || err <= floor || depth <= 0) {
        if (err > tol) ok = false;
        return left + right;
    }
    return adaptive_gl(f, a, m, left, 0.5 * tol, depth - 1, n, ok) +
           adaptive_gl(f, m, b, right, 0.5 * tol, depth - 1, n, ok);
}
}  // namespace detail

struct Result {
    double value = 0;
    bool converged = true;
};

// Adaptive bisection with an n-point Gauss-Legendre rule on each cell.
template <class F>
Result adaptive(F&& f, double a, double b, double tol = 1e-13, int n = 32, int max_depth = 30) {
    bool ok = true;
    const double whole = gl(f, a, b, n);
    const double v = detail::adaptive_gl(f, a, b, whole, tol, max_depth, n, ok);
    return {v, ok};
}

}  // namespace twj::quad
