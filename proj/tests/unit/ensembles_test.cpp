#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "deflab/ensembles/ensembles.hpp"
#include "deflab/linalg/eigen.hpp"
#include "test_support.hpp"

namespace deflab::testing {
namespace {

using ensembles::EnsembleKind;
using ensembles::RngStream;

double semicircle_cdf(double x) {
    x = std::clamp(x, -2.0, 2.0);
    return 0.5 + x * std::sqrt(4.0 - x * x) / (4.0 * std::numbers::pi) +
           std::asin(x / 2.0) / std::numbers::pi;
}

// Total variation distance between the histogram of eigenvalues/√n on 10 bins over
// [-2, 2] (mass outside is its own bin) and the semicircle law.
double semicircle_tv(const SymmetricMatrix& m) {
    const auto lam = linalg::sym_eig_baseline(m).eigenvalues;
    const double n = static_cast<double>(lam.size());
    constexpr int bins = 10;
    std::vector<double> counts(bins + 1, 0.0);
    for (double l : lam) {
        const double x = l / std::sqrt(n);
        if (x < -2.0 || x >= 2.0) {
            counts[bins] += 1.0;
            continue;
        }
        counts[std::min(bins - 1, static_cast<int>((x + 2.0) / 4.0 * bins))] += 1.0;
    }
    double tv = counts[bins] / n;
    for (int b = 0; b < bins; ++b) {
        const double lo = -2.0 + 4.0 * b / bins, hi = lo + 4.0 / bins;
        tv += std::abs(counts[b] / n - (semicircle_cdf(hi) - semicircle_cdf(lo)));
    }
    return 0.5 * tv;
}

template <class Cdf>
double ks_against(std::vector<double> x, Cdf cdf) {
    std::sort(x.begin(), x.end());
    double d = 0.0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double f = cdf(x[i]);
        d = std::max({d, std::abs(f - i / n), std::abs((i + 1) / n - f)});
    }
    return d;
}

struct Moments {
    double mean = 0.0, var = 0.0;
};

Moments moments(const std::vector<double>& x) {
    Moments m;
    for (double v : x) m.mean += v;
    m.mean /= static_cast<double>(x.size());
    for (double v : x) m.var += (v - m.mean) * (v - m.mean);
    m.var /= static_cast<double>(x.size() - 1);
    return m;
}

// ------------------------------------------------------------------- RngStream

TEST(RngStream, SameKeySameSequence) {
    RngStream a(42, 7), b(42, 7);
    for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
    RngStream c(42, 7), d(42, 7);
    for (int i = 0; i < 100; ++i) EXPECT_EQ(c.normal(), d.normal());
}

TEST(RngStream, DistinctStreamsDiffer) {
    RngStream a(42, 7), b(42, 8), c(43, 7);
    int same_ab = 0, same_ac = 0;
    for (int i = 0; i < 100; ++i) {
        const auto x = a.next_u64();
        same_ab += x == b.next_u64();
        same_ac += x == c.next_u64();
    }
    EXPECT_EQ(same_ab, 0);
    EXPECT_EQ(same_ac, 0);
}

TEST(RngStream, UniformAndNormalMoments) {
    RngStream r(1, 1);
    std::vector<double> u(100000), z(100000);
    for (double& x : u) {
        x = r.uniform();
        ASSERT_GE(x, 0.0);
        ASSERT_LT(x, 1.0);
    }
    for (double& x : z) x = r.normal();
    const auto mu = moments(u), mz = moments(z);
    EXPECT_NEAR(mu.mean, 0.5, 3 * std::sqrt(1.0 / 12 / 1e5));
    EXPECT_NEAR(mz.mean, 0.0, 3 * std::sqrt(1.0 / 1e5));
    EXPECT_NEAR(mz.var, 1.0, 3 * std::sqrt(2.0 / 1e5));
}

TEST(RngStream, StreamIdsSeparateSamples) {
    std::set<std::uint64_t> ids;
    for (auto k : {EnsembleKind::GOE, EnsembleKind::UDSJ})
        for (std::size_t n : {10u, 30u})
            for (std::uint64_t s = 0; s < 50; ++s) ids.insert(ensembles::stream_id(k, n, s));
    EXPECT_EQ(ids.size(), 200u);
}

// ---------------------------------------------------------------------- Wigner

TEST(SampleGoe, OneByOneIsNormalWithVarianceTwo) {
    RngStream r(3, 0);
    std::vector<double> x(100000);
    for (double& v : x) v = ensembles::sample_goe(1, r)(0, 0);
    const auto m = moments(x);
    EXPECT_NEAR(m.mean, 0.0, 3 * std::sqrt(2.0 / 1e5));
    EXPECT_NEAR(m.var, 2.0, 3 * 2.0 * std::sqrt(2.0 / 1e5));
}

TEST(SampleGoe, DiagonalAndOffDiagonalVariances) {
    RngStream r(4, 0);
    std::vector<double> diag, off;
    for (int t = 0; t < 25000; ++t) {
        const auto m = ensembles::sample_goe(4, r);
        for (std::size_t i = 0; i < 4; ++i) {
            diag.push_back(m(i, i));
            for (std::size_t j = 0; j < i; ++j) off.push_back(m(i, j));
        }
    }
    const double nd = static_cast<double>(diag.size()), no = static_cast<double>(off.size());
    EXPECT_NEAR(moments(diag).var, 2.0, 3 * 2.0 * std::sqrt(2.0 / (nd - 1)));
    EXPECT_NEAR(moments(off).var, 1.0, 3 * 1.0 * std::sqrt(2.0 / (no - 1)));
}

TEST(SampleWigner, SymmetricStorage) {
    RngStream r(5, 0);
    for (auto sampler : {ensembles::sample_goe, ensembles::sample_gaussian_wigner,
                         ensembles::sample_bernoulli}) {
        const auto m = sampler(9, r);
        for (std::size_t i = 0; i < 9; ++i)
            for (std::size_t j = 0; j < 9; ++j) EXPECT_EQ(m(i, j), m(j, i));
    }
}

TEST(SampleGaussianWigner, UnitVariances) {
    RngStream r(6, 0);
    std::vector<double> all;
    for (int t = 0; t < 10000; ++t) {
        const auto m = ensembles::sample_gaussian_wigner(3, r);
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j <= i; ++j) all.push_back(m(i, j));
    }
    EXPECT_NEAR(moments(all).var, 1.0, 3 * std::sqrt(2.0 / all.size()));
}

TEST(SampleBernoulli, EntriesAreSignsWithZeroMean) {
    RngStream r(7, 0);
    std::vector<double> all;
    for (int t = 0; t < 10000; ++t) {
        const auto m = ensembles::sample_bernoulli(4, r);
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j <= i; ++j) {
                ASSERT_TRUE(m(i, j) == 1.0 || m(i, j) == -1.0);
                all.push_back(m(i, j));
            }
    }
    EXPECT_NEAR(moments(all).mean, 0.0, 3 / std::sqrt(static_cast<double>(all.size())));
}

TEST(SemicircleLaw, WignerClassAtTwoHundred) {
    RngStream r(8, 0);
    EXPECT_LT(semicircle_tv(ensembles::sample_goe(200, r)), 0.1);
    EXPECT_LT(semicircle_tv(ensembles::sample_gaussian_wigner(200, r)), 0.1);
    EXPECT_LT(semicircle_tv(ensembles::sample_bernoulli(200, r)), 0.1);
    EXPECT_LT(semicircle_tv(ensembles::sample_hermite1(200, r).to_dense()), 0.1);
}

// -------------------------------------------------------------------- Hermite-1

TEST(SampleHermite1, OneByOne) {
    RngStream r(9, 0);
    const auto j = ensembles::sample_hermite1(1, r);
    EXPECT_EQ(j.size(), 1u);
    EXPECT_TRUE(j.b.empty());
}

TEST(SampleHermite1, FirstOffDiagonalIsChiNine) {
    RngStream r(10, 0);
    std::vector<double> b2, a;
    for (int t = 0; t < 100000; ++t) {
        const auto j = ensembles::sample_hermite1(10, r);
        ASSERT_TRUE(j.is_jacobi());
        b2.push_back(j.b[0] * j.b[0]);
        a.push_back(j.a[3]);
    }
    EXPECT_NEAR(moments(b2).mean, 9.0, 3 * std::sqrt(18.0 / 1e5));
    EXPECT_NEAR(moments(a).var, 2.0, 3 * 2.0 * std::sqrt(2.0 / 1e5));
}

TEST(SampleHermite1, LastOffDiagonalIsChiOne) {
    RngStream r(11, 0);
    std::vector<double> b2;
    for (int t = 0; t < 50000; ++t) {
        const auto j = ensembles::sample_hermite1(6, r);
        b2.push_back(j.b.back() * j.b.back());
    }
    EXPECT_NEAR(moments(b2).mean, 1.0, 3 * std::sqrt(2.0 / 5e4));
}

// ------------------------------------------------------------------------ UDSJ

TEST(SampleUdsj, TwoByTwoMarginalIsUniform) {
    RngStream r(12, 0);
    std::vector<double> b(10000);
    for (double& x : b) x = ensembles::sample_udsj(2, r, 50).b[0];
    EXPECT_LT(ks_against(b, [](double x) { return std::clamp(x, 0.0, 1.0); }), 0.02);
}

TEST(SampleUdsj, ThreeByThreeMarginalMatchesTriangle) {
    // Polytope {b1, b2 >= 0, b1 + b2 <= 1}: marginal CDF of b1 is 1 - (1 - x)².
    RngStream r(13, 0);
    std::vector<double> b(10000);
    for (double& x : b) x = ensembles::sample_udsj(3, r, 50).b[0];
    EXPECT_LT(ks_against(b, [](double x) { return 1 - (1 - x) * (1 - x); }), 0.02);
}

TEST(SampleUdsj, ThreeByThreeAgreesWithRejectionSampling) {
    RngStream r(14, 0), q(14, 1);
    std::vector<double> gibbs, rejection;
    while (rejection.size() < 5000) {
        const double x = q.uniform(), y = q.uniform();
        if (x + y <= 1.0) rejection.push_back(y);
    }
    for (int t = 0; t < 5000; ++t) gibbs.push_back(ensembles::sample_udsj(3, r, 50).b[1]);
    std::sort(rejection.begin(), rejection.end());
    // Two-sample KS at the 1% level: 1.63 √(2/5000).
    std::sort(gibbs.begin(), gibbs.end());
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < gibbs.size() && j < rejection.size()) {
        if (gibbs[i] <= rejection[j]) ++i;
        else ++j;
        d = std::max(d, std::abs(i / 5000.0 - j / 5000.0));
    }
    EXPECT_LT(d, 1.63 * std::sqrt(2.0 / 5000));
}

TEST(SampleUdsj, StaysInPolytopeWithUnitRowSums) {
    RngStream r(15, 0);
    for (std::size_t n : {2u, 5u, 40u}) {
        for (int t = 0; t < 20; ++t) {
            const auto j = ensembles::sample_udsj(n, r);
            ASSERT_TRUE(j.is_jacobi());
            for (std::size_t i = 0; i < n; ++i) {
                EXPECT_GE(j.a[i], 0.0);
                const double row = j.a[i] + (i > 0 ? j.b[i - 1] : 0.0) + (i + 1 < n ? j.b[i] : 0.0);
                EXPECT_NEAR(row, 1.0, 1e-15);
            }
            const auto lam = linalg::sym_eig_baseline(j.to_dense()).eigenvalues;
            EXPECT_LE(lam.front(), 1.0 + 1e-12);
            EXPECT_GE(lam.back(), -1.0 - 1e-12);
        }
    }
}

// ------------------------------------------------------------------------- JUE

TEST(SampleJue, OneByOneIsUniformOnMinusTwoTwo) {
    RngStream r(16, 0);
    std::vector<double> x(10000);
    for (double& v : x) {
        v = ensembles::sample_jue(1, r).a[0];
        ASSERT_GE(v, -2.0);
        ASSERT_LE(v, 2.0);
    }
    EXPECT_LT(ks_against(x, [](double v) { return (v + 2.0) / 4.0; }), 0.02);
}

TEST(SampleJue, SpectrumInsideIntervalAndWeightsPositive) {
    RngStream r(17, 0);
    for (std::size_t n : {3u, 10u, 40u}) {
        const auto j = ensembles::sample_jue(n, r);
        ASSERT_TRUE(j.is_jacobi());
        const auto s = linalg::spectral_map(j);
        const double bound = 2 * std::sqrt(static_cast<double>(n)) * (1 + 1e-10);
        EXPECT_LE(s.lambdas.front(), bound);
        EXPECT_GE(s.lambdas.back(), -bound);
        for (double u : s.u) EXPECT_GT(u, 0.0);
    }
}

TEST(SampleJue, NoLevelRepulsionAtTwo) {
    // Gap of two iid Uniform(-r, r) draws: P(gap < δ) = 1 - (1 - δ/(2r))².
    RngStream r(18, 0);
    const double width = 4 * std::sqrt(2.0), delta = 0.05 * width;
    int small = 0;
    const int trials = 10000;
    for (int t = 0; t < trials; ++t) {
        const auto s = linalg::spectral_map(ensembles::sample_jue(2, r));
        small += (s.lambdas[0] - s.lambdas[1]) < delta;
    }
    const double p = 1 - 0.95 * 0.95;
    EXPECT_NEAR(small / double(trials), p, 3 * std::sqrt(p * (1 - p) / trials));
}

// --------------------------------------------------------------- determinism

TEST(Sample, IdenticalStreamsGiveIdenticalMatrices) {
    for (auto k : {EnsembleKind::GOE, EnsembleKind::GaussianWigner, EnsembleKind::Bernoulli,
                   EnsembleKind::Hermite1, EnsembleKind::UDSJ, EnsembleKind::JUE}) {
        RngStream a(99, ensembles::stream_id(k, 12, 3)), b(99, ensembles::stream_id(k, 12, 3));
        const auto x = ensembles::sample({k}, 12, a);
        const auto y = ensembles::sample({k}, 12, b);
        EXPECT_EQ(x, y) << ensembles::ensemble_name(k);
        EXPECT_EQ(ensembles::is_tridiagonal(k), std::holds_alternative<JacobiMatrix>(x));
    }
}

TEST(Sample, NamesRoundTrip) {
    for (auto k : {EnsembleKind::GOE, EnsembleKind::GaussianWigner, EnsembleKind::Bernoulli,
                   EnsembleKind::Hermite1, EnsembleKind::UDSJ, EnsembleKind::JUE})
        EXPECT_EQ(ensembles::parse_ensemble(ensembles::ensemble_name(k)), k);
    EXPECT_FALSE(ensembles::parse_ensemble("gue").has_value());
}

}  // namespace
}  // namespace deflab::testing
