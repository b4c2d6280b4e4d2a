#include <gtest/gtest.h>

#include <boost/math/distributions/beta.hpp>

#include "twj/montecarlo.hpp"
#include "twj/oracle.hpp"

using namespace twj;

TEST(ExactP1, EqualDegreesTwoGiveUniform) {
    for (double x : {0.0, 0.1, 0.37, 0.5, 0.9, 1.0}) EXPECT_NEAR(exact_cdf_p1(2, 2, x), x, 1e-14);
}

TEST(ExactP1, EndpointsAndErrors) {
    EXPECT_EQ(exact_cdf_p1(40, 4, 0.0), 0.0);
    EXPECT_EQ(exact_cdf_p1(40, 4, 1.0), 1.0);
    EXPECT_THROW(exact_cdf_p1(40, 4, 1.5), validation_error);
    EXPECT_THROW(exact_cdf_p1(0, 4, 0.5), validation_error);
}

TEST(ExactP1, MedianAgreesWithSimulation) {
    const double med = boost::math::median(boost::math::beta_distribution<double>(2.0, 20.0));
    EXPECT_NEAR(exact_cdf_p1(40, 4, med), 0.5, 1e-12);
    SimConfig cfg{StatParams(1, 40, 4), Ensemble::real, 10000, 5, 1, 1};
    const EmpiricalCDF E = empirical_cdf(simulate_largest(cfg).theta, {med}, cfg.reps, cfg.seed);
    EXPECT_NEAR(E.estimates[0], 0.5, 3 * 0.005);
}

TEST(ExactP2, FrozenReferenceValues) {
    // Direct two-dimensional integration of the joint root density at 30 digits.
    const std::pair<double, double> real[] = {{0.2, 0.21656451573391228654},
                                              {0.35, 0.65258918578565045655},
                                              {0.5, 0.9179824812348197525},
                                              {0.7, 0.99705681107822827406}};
    for (auto [x, F] : real) EXPECT_NEAR(exact_cdf_p2(16, 4, x), F, 1e-10) << x;
    const std::pair<double, double> cplx[] = {{0.2, 0.13655445468583646697},
                                              {0.35, 0.71805236403017112216},
                                              {0.5, 0.97689838637597858906}};
    for (auto [x, F] : cplx) EXPECT_NEAR(exact_cdf_p2(16, 4, x, Ensemble::complex), F, 1e-10) << x;
}

TEST(ExactP2, OrderingsAgree) {
    for (Ensemble e : {Ensemble::real, Ensemble::complex})
        for (double x : {0.1, 0.25, 0.4, 0.6, 0.85})
            EXPECT_NEAR(exact_cdf_p2(16, 4, x, e, PairOrdering::below_diagonal),
                        exact_cdf_p2(16, 4, x, e, PairOrdering::above_diagonal), 1e-12);
}

TEST(ExactP2, DistributionShape) {
    EXPECT_EQ(exact_cdf_p2(16, 4, 1.0), 1.0);
    EXPECT_EQ(exact_cdf_p2(16, 4, 0.0), 0.0);
    double prev = 0;
    for (int i = 1; i <= 50; ++i) {
        const double F = exact_cdf_p2(16, 4, i / 51.0);
        EXPECT_GE(F, prev - 1e-14);
        prev = F;
    }
    EXPECT_THROW(exact_cdf_p2(16, 4, -0.1), validation_error);
    EXPECT_THROW(exact_cdf_p2(1, 4, 0.5), validation_error);
}

TEST(ExactP2, ComplexLawIsDistinct) {
    double gap = 0;
    for (double x : {0.15, 0.25, 0.35, 0.45}) gap = std::max(gap, std::fabs(exact_cdf_p2(16, 4, x) - exact_cdf_p2(16, 4, x, Ensemble::complex)));
    EXPECT_GT(gap, 5e-8);
    EXPECT_GT(gap, 0.01);
}

TEST(ExactP2, UpperPercentileMatchesSimulation) {
    SimConfig cfg{StatParams(2, 16, 4), Ensemble::real, 10000, 3, 1, 1};
    auto th = simulate_largest(cfg).theta;
    std::nth_element(th.begin(), th.begin() + 9500, th.end());
    const double F = exact_cdf_p2(16, 4, th[9500]);
    EXPECT_NEAR(F, 0.95, 3 * std::sqrt(0.95 * 0.05 / cfg.reps));
}

TEST(Fredholm, TailsAndMonotonicity) {
    EXPECT_GE(fredholm_f2(6.0), 1 - 1e-6);
    EXPECT_LE(fredholm_f2(-8.0), 1e-3);
    double prev = 0;
    for (double s = -7; s <= 4; s += 0.5) {
        const double F = fredholm_f2(s);
        EXPECT_GT(F, prev);
        prev = F;
    }
    EXPECT_THROW(fredholm_f2(std::numeric_limits<double>::infinity()), validation_error);
}

TEST(Fredholm, AgreesWithPainleveRoute) {
    for (double s : {-4.0, -2.0, 0.0, 2.0}) {
        const FredholmResult r = fredholm_f2_ex(s);
        EXPECT_TRUE(r.converged);
        EXPECT_NEAR(r.value, tw_cdf(2, s), 1e-6) << s;
    }
}
