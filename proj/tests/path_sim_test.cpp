#include "fixtures.hpp"

#include <hjmm/error.hpp>
#include <hjmm/path_sim.hpp>

#include <gtest/gtest.h>

#include <cmath>

using namespace hjmm;
using namespace hjmm::test;

TEST(PathSeed, DistinctAndStable) {
    EXPECT_EQ(path_seed(42, 3), path_seed(42, 3));
    EXPECT_NE(path_seed(42, 3), path_seed(42, 4));
    EXPECT_NE(path_seed(42, 3), path_seed(43, 3));
}

TEST(SimulatePath, DeterministicPerSeed) {
    const auto spec = gamma_subordinator();
    const JumpPath a = simulate_path(spec, 1.0, 17, 1e-3);
    const JumpPath b = simulate_path(spec, 1.0, 17, 1e-3);
    ASSERT_EQ(a.jumps.size(), b.jumps.size());
    for (std::size_t k = 0; k < a.jumps.size(); ++k) {
        EXPECT_EQ(a.jumps[k].time, b.jumps[k].time);
        EXPECT_EQ(a.jumps[k].size, b.jumps[k].size);
    }
}

TEST(SimulatePath, DriftOnlyIsLinear) {
    const JumpPath p = simulate_path(drift_only(0.7), 1.0, 1, 0.0);
    EXPECT_TRUE(p.jumps.empty());
    EXPECT_DOUBLE_EQ(p.L(0.5), 0.35);
}

TEST(SimulatePath, TruncatedGammaDriftCompensates) {
    // c = a - int_eps^1 y nu(dy) = (1 - e^-1) - (e^-eps - e^-1) = 1 - e^-eps
    const double eps = 1e-3;
    const JumpPath p = simulate_path(gamma_subordinator(), 1.0, 5, eps);
    EXPECT_NEAR(p.drift_rate, -std::expm1(-eps), 1e-12);
    for (const Jump& j : p.jumps) EXPECT_GE(j.size, eps);
}

TEST(SimulatePath, PointMassCountsArePoisson) {
    // atom at 1.5 with intensity 3 over [0, 1]: mean count 3, variance 3
    const auto spec = point_masses({{1.5, 3.0}});
    double sum = 0.0, sq = 0.0;
    const int n = 4000;
    for (int k = 0; k < n; ++k) {
        const double c = static_cast<double>(simulate_path(spec, 1.0, path_seed(9, k), 0.0).jumps.size());
        sum += c;
        sq += c * c;
    }
    const double mean = sum / n, var = sq / n - mean * mean;
    EXPECT_NEAR(mean, 3.0, 4.0 * std::sqrt(3.0 / n));
    EXPECT_NEAR(var, 3.0, 0.25);
}

TEST(SimulatePath, GammaJumpSizesMatchTruncatedLaw) {
    // above eps = 0.5 the mean jump size is int y nu / nu = e^-0.5 / E1(0.5)
    const double eps = 0.5;
    const auto spec = gamma_subordinator();
    double sum = 0.0;
    std::size_t count = 0;
    for (int k = 0; k < 10000; ++k)
        for (const Jump& j : simulate_path(spec, 1.0, path_seed(4, k), eps).jumps) {
            sum += j.size;
            ++count;
        }
    const double want = std::exp(-0.5) / 0.5597735947761608;
    EXPECT_NEAR(sum / count, want, 0.03);
}

TEST(SimulatePath, RejectsGaussianAndNegativeJumps) {
    LevyModelSpec q = drift_only(0.0);
    q.gaussian_q = 1.0;
    EXPECT_THROW(simulate_path(q, 1.0, 1, 0.0), Error);
    EXPECT_THROW(simulate_path(point_masses({{-0.2, 1.0}}), 1.0, 1, 0.0), Error);
    EXPECT_THROW(simulate_path(gamma_subordinator(), 1.0, 1, 0.0), Error);  // infinite activity needs eps
}

TEST(FieldB, DriftOnlyIsExponentialOfIntegral) {
    // b(t, T) = exp(c int_0^t lambda(s, T) ds) with lambda = 0.5: exp(0.35 t)
    const GridSpec g = grid(1.0 / 16.0);
    const JumpPath p = simulate_path(drift_only(0.7), 1.0, 1, 0.0);
    const RateField b = field_b(constant_vol(0.5), p, g);
    for (Eigen::Index i = 0; i < g.time_nodes(); ++i) EXPECT_NEAR(b(i, g.maturity_nodes() - 1), std::exp(0.35 * g.time(i)), 1e-14);
}

TEST(FieldB, JumpEntersProduct) {
    JumpPath p;
    p.horizon = 1.0;
    p.jumps = {{0.3, 2.0}};
    const GridSpec g = grid(0.25);
    const RateField b = field_b(constant_vol(0.5), p, g);
    EXPECT_DOUBLE_EQ(b(1, 4), 1.0);  // t = 0.25 < 0.3
    EXPECT_DOUBLE_EQ(b(2, 4), 2.0);  // 1 + 0.5 * 2
    EXPECT_DOUBLE_EQ(field_b_at(constant_vol(0.5), p, 0.3, 1.0, true), 1.0);
    EXPECT_DOUBLE_EQ(field_b_at(constant_vol(0.5), p, 0.3, 1.0, false), 2.0);
}

TEST(FieldA, RejectsNonPositiveCurve) {
    const GridSpec g = grid(0.25);
    const RateField b = RateField::Ones(g.time_nodes(), g.maturity_nodes());
    try {
        field_a(Profile::affine(1.0, -1.0), b, g);
        FAIL() << "expected NonPositiveInitialCurve";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NonPositiveInitialCurve);
        EXPECT_NE(std::string(e.what()).find("(A1)"), std::string::npos);
    }
}
