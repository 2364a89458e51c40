#include "fixtures.hpp"

#include <hjmm/error.hpp>
#include <hjmm/quadrature.hpp>

#include <gtest/gtest.h>

#include <cmath>

using namespace hjmm;
using namespace hjmm::test;

TEST(Quadrature, TanhSinhHandlesEndpointSingularity) {
    // int_0^1 y^-0.5 dy = 2
    const auto r = tanh_sinh([](double y) { return 1.0 / std::sqrt(y); }, 0.0, 1.0);
    EXPECT_TRUE(r.converged);
    EXPECT_NEAR(r.value, 2.0, 1e-12);
}

TEST(Quadrature, ExpSinhHalfLine) {
    // int_1^inf e^-y / y dy = E1(1)
    const auto r = exp_sinh([](double y) { return std::exp(-y) / y; }, 1.0);
    EXPECT_TRUE(r.converged);
    EXPECT_NEAR(r.value, 0.21938393439552026, 1e-13);
}

TEST(Quadrature, TrapezoidExactOnLinear) {
    Eigen::VectorXd v = Eigen::VectorXd::LinSpaced(65, 0.0, 2.0);  // f(x) = x on [0, 2]
    EXPECT_NEAR(trapezoid(v, 2.0 / 64.0), 2.0, 1e-14);
    const Eigen::VectorXd c = cumulative_trapezoid(v, 2.0 / 64.0);
    EXPECT_EQ(c(0), 0.0);
    EXPECT_NEAR(c(32), 0.5, 1e-14);
}

TEST(Exponent, GammaFrullani) {
    const auto spec = gamma_subordinator();
    for (double z : {0.0, 0.5, std::exp(1.0) - 1.0, 10.0, 1e3}) {
        EXPECT_NEAR(exponent(spec, z), -std::log1p(z), 1e-10 * std::max(1.0, std::log1p(z))) << z;
        EXPECT_NEAR(exponent_derivative(spec, z, 1), -1.0 / (1.0 + z), 1e-10) << z;
        EXPECT_NEAR(exponent_derivative(spec, z, 2), 1.0 / ((1.0 + z) * (1.0 + z)), 1e-10) << z;
    }
}

TEST(Exponent, PointMassClosedForm) {
    // single atom at 2 with mass 1, no compensation: J(z) = e^{-2z} - 1
    const auto spec = point_masses({{2.0, 1.0}});
    EXPECT_DOUBLE_EQ(exponent_derivative(spec, 0.0, 1), -2.0);
    EXPECT_DOUBLE_EQ(exponent_derivative(spec, 0.0, 2), 4.0);
    EXPECT_NEAR(exponent(spec, 0.7), std::expm1(-1.4), 1e-15);
}

TEST(Exponent, GaussianAndDrift) {
    LevyModelSpec s = drift_only(0.4);
    s.gaussian_q = 2.0;
    EXPECT_NEAR(exponent(s, 3.0), -0.4 * 3.0 + 9.0, 1e-14);
    EXPECT_NEAR(exponent_derivative(s, 3.0, 1), -0.4 + 6.0, 1e-14);
}

TEST(Exponent, StableSmallJumpMoment) {
    // U(x) = c x^{2-alpha} / (2 - alpha)
    const auto s = stable(0.5);
    EXPECT_NEAR(small_jump_moment(s, 0.25), std::pow(0.25, 1.5) / 1.5, 1e-14);
}

TEST(Exponent, GammaMoments) {
    const auto s = gamma_subordinator();
    EXPECT_NEAR(small_jump_moment(s, 1.0), 1.0 - 2.0 / std::exp(1.0), 1e-13);
    EXPECT_NEAR(mass(s, 1.0, INFINITY), 0.21938393439552026, 1e-12);
    EXPECT_NEAR(first_moment(s, 0.0, 1.0), 1.0 - std::exp(-1.0), 1e-13);
}

TEST(Exponent, TableMatchesDirect) {
    const LevyExponent table(gamma_subordinator());
    EXPECT_TRUE(table.tabulated());
    for (double z : {0.0, 1e-3, 0.37, 5.5, 123.4, 9.9e5, 2e6}) {
        EXPECT_NEAR(table.value(z), -std::log1p(z), 1e-9 * std::max(1.0, std::log1p(z))) << z;
        EXPECT_NEAR(table.derivative(z), -1.0 / (1.0 + z), 1e-9 / (1.0 + z)) << z;
    }
}

TEST(Exponent, DerivativeIsNondecreasing) {
    const auto s = stable(0.5);
    double prev = exponent_derivative(s, 0.0, 1);
    for (double z = 0.01; z < 100.0; z *= 1.3) {
        const double d = exponent_derivative(s, z, 1);
        EXPECT_GE(d, prev - 1e-12);
        prev = d;
    }
}

TEST(Exponent, SmallJumpPartSplitsExponent) {
    // J = J_eps + small-jump part; J_eps of a Gamma subordinator is finite activity.
    const auto s = gamma_subordinator();
    const double z = 2.0, eps = 1e-2;
    const double small = small_jump_exponent(s, eps, z);
    const double direct = tanh_sinh([&](double y) { return (std::exp(-z * y) - 1.0 + z * y) * std::exp(-y) / y; }, 0.0, eps).value;
    EXPECT_NEAR(small, direct, 1e-12);
}

TEST(Classifier, TruthTable) {
    LevyModelSpec q = drift_only(0.0);
    q.gaussian_q = 1.0;
    EXPECT_EQ(classify_growth(q, 1.0, 1.0).verdict, Verdict::ExplosionCubicLog);
    EXPECT_EQ(classify_growth(point_masses({{-0.5, 1.0}}), 1.0, 1.0).verdict, Verdict::ExplosionCubicLog);
    EXPECT_EQ(classify_growth(gamma_subordinator(), 1.0, 1.0).verdict, Verdict::ExistenceLogGrowth);
    const auto lo = classify_growth(stable(0.5), 1.0, 1.0);
    EXPECT_EQ(lo.verdict, Verdict::ExistenceLogGrowth);
    ASSERT_TRUE(lo.rho);
    EXPECT_NEAR(*lo.rho, 1.5, 1e-12);
    const auto hi = classify_growth(stable(1.5), 1.0, 1.0);
    EXPECT_EQ(hi.verdict, Verdict::ExplosionCubicLog);
    EXPECT_EQ(hi.rule_fired, GrowthRule::TauberianRhoLt1);
    ASSERT_TRUE(hi.rho);
    EXPECT_NEAR(*hi.rho, 0.5, 1e-12);
}

TEST(Classifier, UncertifiedUserDensityIsIndeterminate) {
    LevyModelSpec s;
    s.measure = UserDensity({{0.01, 100.0}, {0.1, 5.0}, {1.0, 0.2}}, false);
    EXPECT_EQ(classify_growth(s, 1.0, 1.0).verdict, Verdict::Indeterminate);
}

TEST(Assumptions, NegativeJumpBelowBoundFailsA2) {
    const auto spec = point_masses({{-2.0, 1.0}});
    const AssumptionReport r = check_assumptions(spec, constant_vol(1.0));
    EXPECT_FALSE(r.a2.passed);
    ASSERT_FALSE(r.failures().empty());
    EXPECT_NE(r.failures().front().find("(A2)"), std::string::npos);
}

TEST(Assumptions, GammaSecondMomentIsOne) {
    const AssumptionReport r = check_assumptions(gamma_subordinator(), constant_vol(0.5));
    EXPECT_TRUE(r.all_passed());
    EXPECT_TRUE(r.second_moment_finite);
    EXPECT_NEAR(r.second_moment, 1.0, 1e-12);
}

TEST(Assumptions, StableHasInfiniteSecondMomentOnlyWithoutCutoff) {
    const AssumptionReport r = check_assumptions(stable(0.5), constant_vol(0.5));
    EXPECT_TRUE(r.second_moment_finite);  // support is bounded by y_max
    EXPECT_NEAR(r.second_moment, 1.0 / 1.5, 1e-12);
}

TEST(Validate, RejectsBadParameters) {
    EXPECT_THROW(validate(stable(2.5)), Error);
    LevyModelSpec g = gamma_subordinator();
    g.measure = GammaLike{-1.0, 1.0};
    EXPECT_THROW(validate(g), Error);
}
