#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <exception>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <random>
#include <thread>
#include <type_traits>
#include <utility>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "twj/approx.hpp"
#include "twj/edge_scaling.hpp"
#include "twj/params.hpp"
#include "twj/special.hpp"

namespace twj {

struct SimConfig {
    StatParams params;
    Ensemble ensemble = Ensemble::real;
    long reps = 10000;
    std::uint64_t seed = 1;
    int chunk_count = 1;
    int threads = 1;   // execution only; results depend on (seed, chunk_count, reps)
};

struct EmpiricalCDF {
    std::vector<double> reference_s;
    std::vector<double> estimates;
    long reps = 0;
    std::uint64_t seed = 0;
    std::vector<double> standard_errors;   // sqrt(F (1 - F) / R)

    void write_csv(std::ostream& os) const {
        os << "s,estimate,se\n" << std::setprecision(17);
        for (std::size_t i = 0; i < reference_s.size(); ++i)
            os << reference_s[i] << ',' << estimates[i] << ',' << standard_errors[i] << '\n';
    }
};

using Engine = std::mt19937_64;

inline Engine chunk_engine(std::uint64_t seed, std::uint64_t chunk) {
    std::seed_seq seq{std::uint32_t(seed), std::uint32_t(seed >> 32), std::uint32_t(chunk),
                      std::uint32_t(chunk >> 32)};
    return Engine(seq);
}

namespace mc_detail {

inline constexpr int max_consecutive_failures = 5;

template <class Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <class Scalar>
Mat<Scalar> gaussian(Engine& eng, std::normal_distribution<double>& nd, int rows, int cols) {
    Mat<Scalar> X(rows, cols);
    for (int j = 0; j < cols; ++j)
        for (int i = 0; i < rows; ++i) {
            if constexpr (std::is_same_v<Scalar, double>) {
                X(i, j) = nd(eng);
            } else {
                const double re = nd(eng), im = nd(eng);
                X(i, j) = Scalar(re * std::numbers::sqrt2 / 2, im * std::numbers::sqrt2 / 2);
            }
        }
    return X;
}

// Roots of det[B - theta (A + B)] = 0 in increasing order, or an empty vector when the
// Cholesky factorization of A + B fails or a root falls outside (0, 1).
template <class Scalar>
Eigen::VectorXd spectrum_once(Engine& eng, std::normal_distribution<double>& nd, const StatParams& s) {
    const Mat<Scalar> X = gaussian<Scalar>(eng, nd, s.m, s.p);
    const Mat<Scalar> Y = gaussian<Scalar>(eng, nd, s.n, s.p);
    const Mat<Scalar> A = X.adjoint() * X;
    const Mat<Scalar> B = Y.adjoint() * Y;
    const Eigen::LLT<Mat<Scalar>> llt(A + B);
    if (llt.info() != Eigen::Success) return {};
    const Mat<Scalar> T = llt.matrixL().solve(B);
    Mat<Scalar> C = llt.matrixL().solve(Mat<Scalar>(T.adjoint()));
    C = (0.5 * (C + C.adjoint())).eval();
    Eigen::SelfAdjointEigenSolver<Mat<Scalar>> es(C, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) return {};
    Eigen::VectorXd ev = es.eigenvalues();
    if (!(ev(0) > 0.0) || !(ev(ev.size() - 1) < 1.0)) {
        // Roots pinned at 0 are structural when n < p; only the largest must be interior then.
        if (!(s.n < s.p && ev(ev.size() - 1) < 1.0 && ev(ev.size() - 1) > 0.0)) return {};
    }
    return ev;
}

}  // namespace mc_detail

// One draw of the full spectrum (sorted increasing). `failures` accumulates resampling events.
inline Eigen::VectorXd sample_spectrum(Engine& eng, std::normal_distribution<double>& nd, const StatParams& s,
                                       Ensemble e, long* failures = nullptr) {
    for (int attempt = 0; attempt < mc_detail::max_consecutive_failures; ++attempt) {
        Eigen::VectorXd ev = e == Ensemble::real ? mc_detail::spectrum_once<double>(eng, nd, s)
                                                 : mc_detail::spectrum_once<std::complex<double>>(eng, nd, s);
        if (ev.size() > 0) return ev;
        if (failures) ++*failures;
    }
    throw numerical_error("simulation: A + B was numerically singular in 5 consecutive draws");
}

inline double sample_largest_root(Engine& eng, std::normal_distribution<double>& nd, const StatParams& s,
                                  Ensemble e, long* failures = nullptr) {
    const Eigen::VectorXd ev = sample_spectrum(eng, nd, s, e, failures);
    return ev(ev.size() - 1);
}

namespace mc_detail {

inline long chunk_reps(long reps, int chunks, int i) { return reps / chunks + (i < reps % chunks ? 1 : 0); }

// Runs `body(chunk_index, engine, normal, count)` for every chunk, spreading chunks over threads.
template <class Body>
void for_each_chunk(const SimConfig& cfg, Body&& body) {
    if (cfg.reps < 1) throw validation_error("simulation: reps must be at least 1");
    if (cfg.chunk_count < 1) throw validation_error("simulation: chunk count must be at least 1");
    const int threads = std::max(1, std::min(cfg.threads, cfg.chunk_count));
    auto run = [&](int first) {
        for (int c = first; c < cfg.chunk_count; c += threads) {
            Engine eng = chunk_engine(cfg.seed, std::uint64_t(c));
            std::normal_distribution<double> nd;
            body(c, eng, nd, chunk_reps(cfg.reps, cfg.chunk_count, c));
        }
    };
    if (threads == 1) {
        run(0);
        return;
    }
    std::vector<std::exception_ptr> errs(threads);
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&, t] {
            try {
                run(t);
            } catch (...) {
                errs[t] = std::current_exception();
            }
        });
    for (auto& th : pool) th.join();
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);
}

}  // namespace mc_detail

struct SimulationResult {
    std::vector<double> theta;   // largest roots, chunk-major order
    long factorization_failures = 0;
};

inline SimulationResult simulate_largest(const SimConfig& cfg) {
    std::vector<std::vector<double>> parts(cfg.chunk_count);
    std::vector<long> fails(cfg.chunk_count, 0);
    mc_detail::for_each_chunk(cfg, [&](int c, Engine& eng, std::normal_distribution<double>& nd, long count) {
        parts[c].reserve(count);
        for (long r = 0; r < count; ++r)
            parts[c].push_back(sample_largest_root(eng, nd, cfg.params, cfg.ensemble, &fails[c]));
    });
    SimulationResult out;
    for (int c = 0; c < cfg.chunk_count; ++c) {
        out.theta.insert(out.theta.end(), parts[c].begin(), parts[c].end());
        out.factorization_failures += fails[c];
    }
    return out;
}

inline std::vector<Eigen::VectorXd> simulate_spectra(const SimConfig& cfg) {
    std::vector<std::vector<Eigen::VectorXd>> parts(cfg.chunk_count);
    mc_detail::for_each_chunk(cfg, [&](int c, Engine& eng, std::normal_distribution<double>& nd, long count) {
        for (long r = 0; r < count; ++r) parts[c].push_back(sample_spectrum(eng, nd, cfg.params, cfg.ensemble));
    });
    std::vector<Eigen::VectorXd> out;
    for (auto& p : parts)
        for (auto& v : p) out.push_back(std::move(v));
    return out;
}

// Standardized statistic: (W - mu_p)/sigma_p on the logit scale, (theta - mu_theta)/sigma_theta on the theta scale.
inline std::vector<double> standardize(const std::vector<double>& theta, const StatParams& s, Ensemble e,
                                       ScaleKind kind) {
    if (kind != ScaleKind::logit && kind != ScaleKind::theta)
        throw validation_error("standardize: scale must be logit or theta");
    const EdgeScaling sc = kind == ScaleKind::logit ? logit_scaling(s, e) : theta_scaling(s, e);
    std::vector<double> z;
    z.reserve(theta.size());
    for (double t : theta) z.push_back(((kind == ScaleKind::logit ? logit(t) : t) - sc.center) / sc.scale);
    return z;
}

inline EmpiricalCDF empirical_cdf(std::vector<double> values, const std::vector<double>& reference_s, long reps,
                                  std::uint64_t seed) {
    std::sort(values.begin(), values.end());
    EmpiricalCDF out;
    out.reference_s = reference_s;
    out.reps = reps;
    out.seed = seed;
    const double R = double(values.size());
    for (double s : reference_s) {
        const double F = double(std::upper_bound(values.begin(), values.end(), s) - values.begin()) / R;
        out.estimates.push_back(F);
        out.standard_errors.push_back(std::sqrt(F * (1.0 - F) / R));
    }
    return out;
}

inline EmpiricalCDF empirical_table(const SimConfig& cfg, const std::vector<double>& tw_points,
                                    ScaleKind kind = ScaleKind::theta) {
    const SimulationResult sim = simulate_largest(cfg);
    return empirical_cdf(standardize(sim.theta, cfg.params, cfg.ensemble, kind), tw_points, cfg.reps, cfg.seed);
}

// Kolmogorov distance between a sample and a continuous CDF.
template <class Cdf>
double ks_distance(std::vector<double> values, Cdf&& cdf) {
    std::sort(values.begin(), values.end());
    const double n = double(values.size());
    double d = 0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double F = cdf(values[i]);
        d = std::max({d, (i + 1) / n - F, F - i / n});
    }
    return d;
}

// Sorted standardized draws paired with F_beta^{-1}((i - 0.5)/R).
inline std::vector<std::pair<double, double>> prob_plot_data(const std::vector<double>& standardized, int beta) {
    if (standardized.size() < 100) throw validation_error("prob_plot_data: need at least 100 draws");
    std::vector<double> z = standardized;
    std::sort(z.begin(), z.end());
    const double R = double(z.size());
    std::vector<std::pair<double, double>> out;
    out.reserve(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) out.emplace_back(z[i], tw_quantile(beta, (i + 0.5) / R));
    return out;
}

inline std::vector<std::pair<double, double>> prob_plot_data(const SimConfig& cfg,
                                                             ScaleKind kind = ScaleKind::logit) {
    const SimulationResult sim = simulate_largest(cfg);
    return prob_plot_data(standardize(sim.theta, cfg.params, cfg.ensemble, kind), tw_beta(cfg.ensemble));
}

}  // namespace twj
