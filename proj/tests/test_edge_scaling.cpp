#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "twj/approx.hpp"
#include "twj/edge_scaling.hpp"
#include "twj/liouville_green.hpp"

using namespace twj;

namespace {

// mpmath references (tests/oracle_scripts/edge_constants.py).
constexpr double u_center_4_35_5 = -0.043135909859416407359, u_scale_4_35_5 = 0.12225794133502834552;
constexpr double real_mu = -0.086271819718832814719, real_sigma = 0.24451588267005669104;
constexpr double cplx_mu = -0.00036937044864697720728, cplx_sigma = 0.23741785789904654745;
constexpr double small_mu = -1.0036216563094253245, small_sigma = 0.19169562518491109004;
constexpr double theta_mu = 0.49474779054849189794, theta_sigma = 0.023696556945527527218;

JacobiParams ab_params(int N, double a, double b) { return JacobiParams(N, a * (N + 0.5), b * (N + 0.5)); }

std::vector<StatParams> random_triples(int count, int min_p = 1) {
    std::mt19937_64 rng(77);
    std::uniform_int_distribution<int> pd(min_p, 50), extra(1, 150), nd(min_p, 150);
    std::vector<StatParams> v;
    while (int(v.size()) < count) {
        const int p = pd(rng);
        v.emplace_back(p, p + extra(rng), nd(rng));
    }
    return v;
}

}  // namespace

TEST(XScale, SymmetricCaseCenter) {
    // alpha = beta with gamma = pi/6: (N + 1/2)/kappa = sin^2(pi/12).
    const int N = 4;
    const double kappa = (N + 0.5) / std::pow(std::sin(std::numbers::pi / 12), 2);
    const double alpha = 0.5 * (kappa - 2 * N - 1);
    const EdgeScaling x = x_scale(JacobiParams(N, alpha, alpha));
    EXPECT_NEAR(x.center, 0.5, 1e-12);
}

TEST(XScale, DefiningIdentity) {
    for (const JacobiParams& j : {JacobiParams(4, 35, 5), ab_params(50, 2, 1), JacobiParams(100, 3, 250)}) {
        const Angles a = angles_from_jacobi(j);
        const double s = x_scale(j).scale, k = j.kappa();
        EXPECT_NEAR(s * s * s * k * k * std::sin(a.phi) * std::sin(a.gamma) / (2 * std::pow(std::sin(a.phi + a.gamma), 4)),
                    1.0, 1e-12);
    }
}

TEST(XScale, RejectsHardEdge) { EXPECT_THROW(x_scale(JacobiParams(5, 0, 3)), validation_error); }

TEST(UScale, CenterVanishesAtRightAngleSum) {
    // Choose beta so that (phi + gamma)/2 = pi/4.
    const int N = 5;
    const double kappa = 60;
    const double half_gamma = std::asin(std::sqrt((N + 0.5) / kappa));
    const double b = std::pow(std::sin(std::numbers::pi / 4 - half_gamma), 2);
    const double beta = b * kappa - N - 0.5, alpha = kappa - 2 * N - 1 - beta;
    const JacobiParams j(N, alpha, beta);
    EXPECT_NEAR(u_scale(j).center, 0.0, 1e-12);
}

TEST(UScale, LogisticSquareIdentity) {
    for (const auto& s : random_triples(200)) {
        if (s.m == s.p) continue;
        const JacobiParams j = to_jacobi(s, Ensemble::real);
        if (j.N < 0) continue;
        const Angles a = angles_from_jacobi(j);
        const double c = u_scale(j).center;
        ASSERT_NEAR(std::pow(std::sin(0.5 * (a.phi + a.gamma)), 2), std::exp(2 * c) / (1 + std::exp(2 * c)), 1e-12);
    }
}

TEST(UScale, ReferenceValues) {
    const EdgeScaling u = u_scale(JacobiParams(4, 35, 5));
    EXPECT_NEAR(u.center, u_center_4_35_5, 1e-14);
    EXPECT_NEAR(u.scale, u_scale_4_35_5, 1e-14);
}

TEST(RealLogit, ReferenceAndIdentity) {
    const StatParams s(5, 40, 10);
    const EdgeScaling r = real_logit_scaling(s);
    EXPECT_NEAR(r.center, real_mu, 1e-14);
    EXPECT_NEAR(r.scale, real_sigma, 1e-14);
    const Angles a = angles_from_stat(s);
    const double k = s.m + s.n - 1;
    EXPECT_NEAR(std::pow(r.scale, 3) * k * k * std::pow(std::sin(a.phi + a.gamma), 2) * std::sin(a.phi) * std::sin(a.gamma),
                16.0, 1e-12);
    ASSERT_EQ(r.caveats.size(), 1u);
    EXPECT_EQ(r.caveats[0], caveat::odd_p);
    EXPECT_TRUE(real_logit_scaling(StatParams(4, 40, 10)).caveats.empty());
}

TEST(RealLogit, DualInvariance) {
    for (const auto& s : random_triples(500)) {
        const StatParams d = dual(s);
        if (s.at_boundary() || d.at_boundary()) continue;
        const EdgeScaling a = real_logit_scaling(s), b = real_logit_scaling(d);
        ASSERT_NEAR(a.center, b.center, 1e-12);
        ASSERT_NEAR(a.scale, b.scale, 1e-12);
    }
}

TEST(RealLogit, IdentityChainFromXScale) {
    for (const auto& s : random_triples(300)) {
        if (s.at_boundary()) continue;
        const EdgeScaling x = x_scale(to_jacobi(s, Ensemble::real)), r = real_logit_scaling(s);
        ASSERT_NEAR(r.center, 2 * std::atanh(x.center), 1e-12 * std::max(1.0, std::fabs(r.center)));
        ASSERT_NEAR(r.scale, 2 * x.scale / (1 - x.center * x.center), 1e-12 * r.scale);
    }
}

TEST(ComplexLogit, ReferenceValues) {
    const EdgeScaling c = complex_logit_scaling(StatParams(5, 40, 10));
    EXPECT_NEAR(c.center / cplx_mu, 1.0, 1e-12);
    EXPECT_NEAR(c.scale, cplx_sigma, 1e-14);
    EXPECT_TRUE(c.caveats.empty());
}

TEST(ComplexLogit, ConvexCombinationAndRate) {
    const StatParams s(30, 200, 60);
    const JacobiParams j = to_jacobi(s, Ensemble::complex);
    const double a = 2 * u_scale(j).center, b = 2 * u_scale(j.with_degree(j.N - 1)).center;
    const double c = complex_logit_scaling(s).center;
    EXPECT_GT(c, std::min(a, b));
    EXPECT_LT(c, std::max(a, b));
    const StatParams big(100, 800, 200);
    const double N = 100;
    const double ratio = complex_logit_scaling(big).scale / (2 * u_scale(to_jacobi(big, Ensemble::complex)).scale);
    EXPECT_LE(std::fabs(ratio - 1), 2 / N);
}

TEST(ComplexLogit, RejectsDegreeOne) {
    EXPECT_THROW(complex_logit_scaling(StatParams(1, 10, 5)), validation_error);
}

TEST(ThetaScale, ReferenceAndTwoForms) {
    const StatParams s(20, 160, 40);
    const EdgeScaling t = theta_scaling(s);
    EXPECT_NEAR(t.center, theta_mu, 1e-14);
    EXPECT_NEAR(t.scale, theta_sigma, 1e-15);
    for (const StatParams& q : {StatParams(5, 40, 10), s, StatParams(2, 16, 4)}) {
        const EdgeScaling th = theta_scaling(q);
        const Angles a = angles_from_stat(q);
        const double k = q.m + q.n - 1;
        EXPECT_NEAR(th.center, std::pow(std::sin(0.5 * (a.phi + a.gamma)), 2), 1e-12);
        EXPECT_NEAR(std::pow(th.scale, 3),
                    std::pow(std::sin(a.phi + a.gamma), 4) / (4 * k * k * std::sin(a.phi) * std::sin(a.gamma)),
                    1e-12 * std::pow(th.scale, 3));
    }
}

TEST(ThetaScale, CenterInUnitInterval) {
    for (const auto& s : random_triples(300)) {
        if (s.at_boundary()) continue;
        const double c = theta_scaling(s).center;
        ASSERT_GT(c, 0);
        ASSERT_LT(c, 1);
    }
}

TEST(SmallestRoot, ReferenceValues) {
    const EdgeScaling r = smallest_root_scaling(StatParams(5, 40, 40));
    EXPECT_TRUE(r.reflected);
    EXPECT_NEAR(r.center, small_mu, 1e-13);
    EXPECT_NEAR(r.scale, small_sigma, 1e-14);
}

TEST(SmallestRoot, SymmetricCaseAndReflection) {
    const StatParams s(6, 30, 30);
    EXPECT_NEAR(smallest_root_scaling(s).center, -real_logit_scaling(s).center, 1e-15);
    const EdgeScaling r = smallest_root_scaling(StatParams(5, 40, 40));
    EXPECT_NEAR(smallest_root_cdf(StatParams(5, 40, 40), logistic(r.center)), 1 - tw_cdf(1, 0), 1e-12);
    EXPECT_THROW(smallest_root_scaling(StatParams(5, 40, 3)), validation_error);
}

TEST(Scales, PositiveForSoftEdges) {
    for (const auto& s : random_triples(500, 2)) {
        if (s.at_boundary()) continue;
        for (Ensemble e : {Ensemble::real, Ensemble::complex}) {
            ASSERT_GT(logit_scaling(s, e).scale, 0);
            ASSERT_GT(theta_scaling(s, e).scale, 0);
        }
        ASSERT_GT(x_scale(to_jacobi(s, Ensemble::real)).scale, 0);
    }
}

TEST(Scales, BoundaryRejected) {
    EXPECT_THROW(real_logit_scaling(StatParams(4, 4, 10)), validation_error);
}

TEST(DegreeStep, RatesAtFixedShape) {
    for (int N : {50, 100, 200}) {
        const DegreeStepDiagnostics d = degree_step_diagnostics(ab_params(N, 2, 1));
        EXPECT_LE(std::fabs(d.sigma_ratio - 1), 10.0 / N);
        EXPECT_LE(std::fabs(d.tau_ratio - 1), 10.0 / N);
    }
    double lo = 1e300, hi = 0;
    for (int N = 50; N <= 800; N *= 2) {
        const DegreeStepDiagnostics d = degree_step_diagnostics(ab_params(N, 2, 1));
        EXPECT_GT(d.delta_N, 0);
        EXPECT_GT(d.u_diff, 0);
        const double scaled = d.delta_N * std::cbrt(double(N));
        lo = std::min(lo, scaled);
        hi = std::max(hi, scaled);
    }
    EXPECT_LT(hi / lo, 1.2);
}

TEST(EN, TendsToOne) {
    double prev = 1e300;
    for (int N : {50, 100, 200, 400}) {
        const JacobiParams j = ab_params(N, 2, 1);
        const double averaged = kernel_u_scaling(j, KernelScaling::averaged).second;
        const double naive = u_scale(j).scale;
        const double e = e_N(j, averaged), e_naive = e_N(j, naive);
        EXPECT_LE(std::fabs(e - 1), 10.0 / N) << N;
        EXPECT_LE(std::fabs(e - e_naive), 1.0 / N) << N;
        EXPECT_LT(std::fabs(e - 1), prev);
        prev = std::fabs(e - 1);
    }
}
