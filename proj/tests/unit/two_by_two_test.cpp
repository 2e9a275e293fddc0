#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "deflab/algorithms/driver.hpp"
#include "deflab/ensembles/ensembles.hpp"
#include "deflab/linalg/spectral.hpp"
#include "deflab/two_by_two.hpp"
#include "test_support.hpp"

namespace deflab::testing {
namespace {

using two_by_two::analytic_tau_2x2;
using two_by_two::Kind;
using two_by_two::TwoByTwoSpectral;

TEST(AnalyticTau, ZeroWhenAlreadySmall) {
    EXPECT_EQ(analytic_tau_2x2({1, 0, 0.01}, 0.1), 0.0);
    EXPECT_EQ(analytic_tau_2x2({1, 0, std::numbers::pi / 4}, 0.5), 0.0);
}

TEST(AnalyticTau, ReferenceValue) {
    EXPECT_NEAR(analytic_tau_2x2({1, 0, std::numbers::pi / 4}, 0.1), 2.29243, 5e-6);
}

TEST(AnalyticTau, ApproachesLogarithmicAsymptote) {
    const TwoByTwoSpectral s{1.5, -0.5, 0.7};
    const double gap = 2.0;
    double prev = std::numeric_limits<double>::infinity();
    for (double eps : {1e-6, 1e-8, 1e-10, 1e-12}) {
        const double asym = (-std::log(eps) + std::log(std::tan(s.theta0)) + std::log(gap)) / gap;
        const double diff = std::abs(analytic_tau_2x2(s, eps) - asym);
        EXPECT_LE(diff, prev);
        prev = diff;
    }
    EXPECT_LT(prev, 1e-12);
}

TEST(AnalyticTau, MonotoneInEpsilonAndTheta) {
    double prev = 0.0;
    for (double eps : {0.3, 0.1, 1e-2, 1e-4}) {
        const double t = analytic_tau_2x2({1, 0, 0.6}, eps);
        EXPECT_GE(t, prev);
        prev = t;
    }
    prev = 0.0;
    for (double theta : {0.2, 0.5, 0.9, 1.3}) {
        const double t = analytic_tau_2x2({1, 0, theta}, 1e-3);
        EXPECT_GT(t, prev);
        prev = t;
    }
}

TEST(AnalyticTau, ScaleCovarianceAgainstBisection) {
    for (double c : {1.0, 2.0, 5.0}) {
        const TwoByTwoSpectral s{c * 0.8, c * -0.4, 0.9};
        const linalg::SpectralData sd{{s.lambda1, s.lambda2}, {std::cos(s.theta0), std::sin(s.theta0)}};
        const double numeric = algorithms::continuous_deflation_time(sd, linalg::GFunction::identity(), 1e-3);
        EXPECT_NEAR(numeric, analytic_tau_2x2(s, 1e-3), 1e-6);
    }
}

TEST(AnalyticTau, Validation) {
    EXPECT_THROW(analytic_tau_2x2({0, 1, 0.5}, 0.1), std::invalid_argument);
    EXPECT_THROW(analytic_tau_2x2({1, 0, 0.0}, 0.1), std::invalid_argument);
    EXPECT_THROW(analytic_tau_2x2({1, 0, 0.5}, 0.0), std::invalid_argument);
}

TEST(Sample2x2, GoeGapMomentsMatchDirectMatrices) {
    // E[(λ₁ - λ₂)²] = E[(m₁₁ - m₂₂)²] + 4 E[m₁₂²] = 4 + 4 = 8; the mean gap is compared
    // with direct GOE sampling followed by the spectral map.
    ensembles::RngStream a(61, 0), b(61, 1);
    const int n = 100000;
    double g2 = 0.0, g1 = 0.0, d1 = 0.0, d1sq = 0.0, g1sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const auto s = two_by_two::sample_2x2(Kind::GOE2, a);
        const double gap = s.lambda1 - s.lambda2;
        g1 += gap;
        g1sq += gap * gap;
        g2 += gap * gap;
        const auto m = ensembles::sample_goe(2, b);
        const double direct = std::hypot(m(0, 0) - m(1, 1), 2 * m(1, 0));
        d1 += direct;
        d1sq += direct * direct;
    }
    g2 /= n;
    EXPECT_NEAR(g2, 8.0, 3 * std::sqrt(8.0 * 8.0 * 1.0 / n));  // Var(gap²) = 64 for this law
    const double mg = g1 / n, md = d1 / n;
    const double se = std::sqrt((g1sq / n - mg * mg) / n + (d1sq / n - md * md) / n);
    EXPECT_NEAR(mg, md, 4 * se);
}

TEST(Sample2x2, ThetaUniformAndJueInUnitInterval) {
    ensembles::RngStream r(62, 0);
    double theta_sum = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        const auto s = two_by_two::sample_2x2(Kind::JUEUnit, r);
        ASSERT_GT(s.lambda1, s.lambda2);
        ASSERT_LE(s.lambda1, 1.0);
        ASSERT_GE(s.lambda2, -1.0);
        theta_sum += s.theta0;
    }
    EXPECT_NEAR(theta_sum / n, std::numbers::pi / 4, 3 * (std::numbers::pi / 2) / std::sqrt(12.0 * n));
}

TEST(McMeanTau, HugeEpsilonGivesZero) {
    ensembles::RngStream r(63, 0);
    const auto est = two_by_two::mc_mean_tau_2x2(Kind::JUEUnit, 10.0, 1000, r);
    EXPECT_EQ(est.mean, 0.0);
    EXPECT_EQ(est.std_error, 0.0);
}

TEST(McMeanTau, RejectsTooFewSamples) {
    ensembles::RngStream r(64, 0);
    EXPECT_THROW(two_by_two::mc_mean_tau_2x2(Kind::GOE2, 1e-3, 99, r), std::invalid_argument);
}

TEST(McMeanTau, Deterministic) {
    ensembles::RngStream a(65, 0), b(65, 0);
    EXPECT_EQ(two_by_two::mc_mean_tau_2x2(Kind::GOE2, 1e-4, 500, a).mean,
              two_by_two::mc_mean_tau_2x2(Kind::GOE2, 1e-4, 500, b).mean);
}

}  // namespace
}  // namespace deflab::testing
