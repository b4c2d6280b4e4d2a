#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "twj/params.hpp"

using namespace twj;

namespace {
// Reference values from tests/oracle_scripts/edge_constants.py (mpmath, 30 digits).
constexpr double gamma_5_40_10 = 0.61577418314398314641;
constexpr double phi_5_40_10 = 0.9118996047849781058;
constexpr double xplus_5_40_10 = -0.043109175331512121138;
}  // namespace

TEST(StatParams, RejectsInvalidTriples) {
    EXPECT_THROW(StatParams(0, 5, 5), validation_error);
    EXPECT_THROW(StatParams(3, 5, 0), validation_error);
    EXPECT_THROW(StatParams(5, 4, 3), validation_error);
    EXPECT_NO_THROW(StatParams(5, 5, 3));
    EXPECT_TRUE(StatParams(5, 5, 3).at_boundary());
}

TEST(Dual, WorkedExamples) {
    EXPECT_EQ(dual(StatParams(5, 40, 10)), StatParams(10, 45, 5));
    EXPECT_EQ(dual(StatParams(7, 30, 7)), StatParams(7, 30, 7));
    EXPECT_EQ(dual(StatParams(2, 16, 4)), StatParams(4, 18, 2));
}

TEST(ToJacobi, RealAndComplex) {
    const JacobiParams r = to_jacobi(StatParams(5, 40, 10), Ensemble::real);
    EXPECT_EQ(r.N, 4);
    EXPECT_EQ(r.alpha, 35);
    EXPECT_EQ(r.beta, 5);
    const JacobiParams c = to_jacobi(StatParams(5, 40, 10), Ensemble::complex);
    EXPECT_EQ(c.N, 5);
    EXPECT_EQ(c.alpha, 35);
    EXPECT_EQ(c.beta, 5);
}

TEST(ToJacobi, BoundaryIsHardEdge) {
    const JacobiParams j = to_jacobi(StatParams(6, 6, 6), Ensemble::real);
    EXPECT_TRUE(j.hard_edge());
    EXPECT_EQ(j.beta, 0);
}

TEST(Angles, ReferenceValues) {
    const Angles a = angles_from_stat(StatParams(5, 40, 10));
    EXPECT_NEAR(a.gamma, gamma_5_40_10, 1e-14);
    EXPECT_NEAR(a.phi, phi_5_40_10, 1e-14);
    EXPECT_NEAR(std::pow(std::sin(a.gamma / 2), 2), 4.5 / 49, 1e-15);
    EXPECT_NEAR(std::pow(std::sin(a.phi / 2), 2), 9.5 / 49, 1e-15);
    const Angles b = angles_from_jacobi(to_jacobi(StatParams(5, 40, 10), Ensemble::real));
    EXPECT_NEAR(a.gamma, b.gamma, 1e-12);
    EXPECT_NEAR(a.phi, b.phi, 1e-12);
}

TEST(Angles, EqualExponentsGiveRightAngle) {
    const Angles a = angles_from_jacobi(JacobiParams(10, 7.0, 7.0));
    EXPECT_NEAR(a.phi, std::numbers::pi / 2, 1e-14);
    const TurningPoints tp = turning_points(a);
    EXPECT_NEAR(tp.x_plus, std::sin(a.gamma), 1e-14);
    EXPECT_NEAR(tp.x_minus, -std::sin(a.gamma), 1e-14);
}

TEST(TurningPoints, CoalesceAtZeroGamma) {
    const TurningPoints tp = turning_points(Angles{0.0, 1.1});
    EXPECT_DOUBLE_EQ(tp.x_plus, tp.x_minus);
    EXPECT_NEAR(tp.x_plus, -std::cos(1.1), 1e-15);
}

TEST(TurningPoints, ReferenceUpperPoint) {
    const TurningPoints tp = turning_points(angles_from_stat(StatParams(5, 40, 10)));
    EXPECT_NEAR(tp.x_plus, xplus_5_40_10, 1e-14);
}

TEST(LGParams, SubstitutionAndIdentities) {
    const JacobiParams j(4, 35, 5);
    const LGParams g = lg_params(j);
    EXPECT_DOUBLE_EQ(g.kappa, 49);
    EXPECT_NEAR(g.lambda, 35.0 / 49, 1e-16);
    EXPECT_NEAR(g.mu, 5.0 / 49, 1e-16);
    const Angles a = angles_from_jacobi(j);
    EXPECT_NEAR(g.lambda + g.mu, std::cos(a.gamma), 1e-14);
    EXPECT_NEAR(g.lambda - g.mu, std::cos(a.phi), 1e-14);
}

TEST(TurningPoints, HardEdgeBoundaries) {
    const TurningPoints a0 = turning_points(lg_params(JacobiParams(5, 0.0, 3.0)));
    EXPECT_NEAR(a0.x_plus, 1.0, 1e-14);
    EXPECT_LT(a0.x_minus, 1.0);
    const TurningPoints b0 = turning_points(lg_params(JacobiParams(5, 3.0, 0.0)));
    EXPECT_NEAR(b0.x_minus, -1.0, 1e-14);
    const TurningPoints soft = turning_points(lg_params(JacobiParams(5, 3.0, 2.0)));
    EXPECT_LT(soft.x_plus, 1.0);
    EXPECT_GT(soft.x_minus, -1.0);
}

class RandomTriples : public ::testing::Test {
protected:
    std::vector<StatParams> triples;
    void SetUp() override {
        std::mt19937_64 rng(20240611);
        std::uniform_int_distribution<int> pd(1, 60), extra(0, 200), nd(1, 200);
        while (triples.size() < 1000) {
            const int p = pd(rng);
            triples.emplace_back(p, p + 1 + extra(rng), nd(rng));
        }
    }
};

TEST_F(RandomTriples, DualInvarianceOfAngles) {
    for (const auto& s : triples) {
        const Angles a = angles_from_stat(s), b = angles_from_stat(dual(s));
        ASSERT_NEAR(a.gamma, b.gamma, 1e-12);
        ASSERT_NEAR(a.phi, b.phi, 1e-12);
    }
}

TEST_F(RandomTriples, AngleConstructionsAgree) {
    for (const auto& s : triples) {
        const Angles a = angles_from_stat(s), b = angles_from_jacobi(to_jacobi(s, Ensemble::real));
        ASSERT_NEAR(a.gamma, b.gamma, 1e-12);
        ASSERT_NEAR(a.phi, b.phi, 1e-12);
    }
}

TEST_F(RandomTriples, GapIdentityAndOrdering) {
    for (const auto& s : triples) {
        const Angles a = angles_from_stat(s);
        ASSERT_GT(a.gamma, 0);
        ASSERT_LE(a.gamma, std::numbers::pi / 2 + 1e-15);
        ASSERT_LE(a.gamma, a.phi + 1e-15);
        ASSERT_LT(a.phi, std::numbers::pi);
        const TurningPoints tp = turning_points(a);
        ASSERT_GE(tp.x_minus, -1.0 - 1e-15);
        ASSERT_LT(tp.x_minus, tp.x_plus);
        ASSERT_LE(tp.x_plus, 1.0 + 1e-15);
        ASSERT_NEAR(tp.x_plus - tp.x_minus, 2 * std::sin(a.phi) * std::sin(a.gamma), 1e-12);
    }
}

TEST_F(RandomTriples, AlgebraicTurningPointsMatchAngles) {
    for (const auto& s : triples) {
        const JacobiParams j = to_jacobi(s, Ensemble::real);
        const TurningPoints a = turning_points(angles_from_jacobi(j)), b = turning_points(lg_params(j));
        ASSERT_NEAR(a.x_plus, b.x_plus, 1e-12);
        ASSERT_NEAR(a.x_minus, b.x_minus, 1e-12);
        const LGParams g = lg_params(j);
        ASSERT_LE(g.lambda + g.mu, 1.0 + 1e-15);
        ASSERT_DOUBLE_EQ(g.kappa, 2.0 * j.N + j.alpha + j.beta + 1);
    }
}
