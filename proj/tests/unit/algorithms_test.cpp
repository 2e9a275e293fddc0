#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "deflab/algorithms/deflation.hpp"
#include "deflab/algorithms/driver.hpp"
#include "deflab/algorithms/sign.hpp"
#include "deflab/algorithms/steps.hpp"
#include "deflab/ensembles/ensembles.hpp"
#include "deflab/linalg/eigen.hpp"
#include "deflab/linalg/spectral.hpp"
#include "deflab/two_by_two.hpp"
#include "test_support.hpp"

namespace deflab::testing {
namespace {

namespace alg = algorithms;
using alg::AlgorithmKind;
using linalg::GFunction;

double relative_spectrum_error(const SymmetricMatrix& a, const SymmetricMatrix& b) {
    const auto ea = linalg::sym_eig_baseline(a).eigenvalues;
    const auto eb = linalg::sym_eig_baseline(b).eigenvalues;
    return max_abs_diff(ea, eb) / std::max(1.0, max_abs_value(ea));
}

// --------------------------------------------------------------- ε̂ and checks

TEST(EpsilonHat, JacobiExample) {
    EXPECT_EQ(alg::deflation_epsilon_hat(JacobiMatrix({1, 2, 3}, {0.3, 0.001}), 2), 0.001);
}

TEST(EpsilonHat, FullTwoByTwo) {
    EXPECT_DOUBLE_EQ(alg::deflation_epsilon_hat(SymmetricMatrix{{1, 0.5}, {0.5, 2}}, 1), 0.5);
}

TEST(EpsilonHat, FullFourByFourBlock) {
    SymmetricMatrix m(4);
    m.set(2, 0, 0.1);
    m.set(3, 1, -0.25);
    m.set(1, 0, 7.0);  // outside the k = 2 block
    EXPECT_DOUBLE_EQ(alg::deflation_epsilon_hat(m, 2), 0.5);
}

TEST(EpsilonHat, IndexOutOfRange) {
    const JacobiMatrix j({1, 2}, {0.5});
    EXPECT_THROW(alg::deflation_epsilon_hat(j, 0), IndexOutOfRange);
    EXPECT_THROW(alg::deflation_epsilon_hat(j, 2), IndexOutOfRange);
    EXPECT_THROW(alg::deflation_epsilon_hat(SymmetricMatrix{{1.0}}, 1), IndexOutOfRange);
}

TEST(EpsilonHat, AllIndicesMatchDirectFormula) {
    std::mt19937_64 gen(41);
    for (std::size_t n : {2u, 3u, 7u, 16u}) {
        const auto m = random_symmetric(n, gen);
        const auto hats = alg::all_epsilon_hats(m);
        ASSERT_EQ(hats.size(), n - 1);
        for (std::size_t k = 1; k < n; ++k) {
            double big = 0.0;
            for (std::size_t i = k; i < n; ++i)
                for (std::size_t j = 0; j < k; ++j) big = std::max(big, std::abs(m(i, j)));
            EXPECT_DOUBLE_EQ(hats[k - 1], std::sqrt(double(k * (n - k))) * big);
        }
    }
}

TEST(CheckDeflation, Examples) {
    EXPECT_EQ(alg::check_deflation(JacobiMatrix({0, 0, 0}, {0.5, 1e-9}), 1e-8), 2u);
    EXPECT_FALSE(alg::check_deflation(JacobiMatrix({0, 0, 0}, {0.5, 0.5}), 1e-8).has_value());
    EXPECT_EQ(alg::check_deflation(JacobiMatrix({0, 0, 0}, {1e-10, 1e-9}), 1e-8), 1u);
    EXPECT_EQ(alg::check_deflation(JacobiMatrix({0, 0, 0}, {1e-10, 1e-10}), 1e-8), 1u);
    // Strict inequality.
    EXPECT_FALSE(alg::check_deflation(JacobiMatrix({0, 0}, {1e-8}), 1e-8).has_value());
}

// ------------------------------------------------------------------- qr_step

TEST(QrStep, DiagonalIsFixedPoint) {
    const auto d = SymmetricMatrix::diagonal(std::vector<double>{3, 2, 1});
    EXPECT_EQ(alg::qr_step(d), d);
    const JacobiMatrix j({3, 2, 1}, {0, 0});
    EXPECT_EQ(alg::qr_step(j), j);
}

TEST(QrStep, SwapMatrixIsFixedPoint) {
    const SymmetricMatrix p{{0, 1}, {1, 0}};
    EXPECT_LT(linalg::max_abs(alg::qr_step(p).dense() - p.dense()), 1e-15);
    const auto j = alg::qr_step(JacobiMatrix({0, 0}, {1}));
    EXPECT_NEAR(j.a[0], 0.0, 1e-15);
    EXPECT_NEAR(j.a[1], 0.0, 1e-15);
    EXPECT_NEAR(j.b[0], 1.0, 1e-15);
}

TEST(QrStep, TwoByTwoAgainstGramSchmidtOracle) {
    const SymmetricMatrix m{{2, 1}, {1, 1}};
    const auto [q, r] = gram_schmidt_qr(m.dense());
    const Matrix expected = r * q;
    const auto got = alg::qr_step(m);
    EXPECT_LT(linalg::max_abs(got.dense() - expected), 1e-14);
    EXPECT_NEAR(got(0, 0) + got(1, 1), 3.0, 1e-14);
    EXPECT_NEAR(got(0, 0) * got(1, 1) - got(0, 1) * got(1, 0), 1.0, 1e-14);
}

TEST(QrStep, DenseAgainstGramSchmidtOracle) {
    std::mt19937_64 gen(42);
    for (int t = 0; t < 10; ++t) {
        const auto m = random_symmetric(7, gen);
        const auto [q, r] = gram_schmidt_qr(m.dense());
        EXPECT_LT(linalg::max_abs(alg::qr_step(m).dense() - r * q), 1e-11);
    }
}

TEST(QrStep, TridiagonalMatchesDense) {
    std::mt19937_64 gen(43);
    for (std::size_t n : {2u, 3u, 9u, 30u}) {
        const auto j = random_jacobi(n, gen);
        const auto dense = alg::qr_step(j.to_dense());
        const auto tri = alg::qr_step(j);
        EXPECT_LT(linalg::max_abs(tri.to_dense().dense() - dense.dense()), 1e-12);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k + 1 < i; ++k) EXPECT_LT(std::abs(dense(i, k)), 1e-12);
        for (double b : tri.b) EXPECT_GE(b, 0.0);
    }
}

TEST(QrStep, SingularThrows) {
    EXPECT_THROW(alg::qr_step(SymmetricMatrix(2)), RankDeficient);
    EXPECT_THROW(alg::qr_step(JacobiMatrix({0, 0, 1}, {0, 1})), RankDeficient);
}

// ------------------------------------------------------------ wilkinson_shift

TEST(WilkinsonShift, Examples) {
    EXPECT_EQ(alg::wilkinson_shift(SymmetricMatrix{{0, 0}, {0, 5}}), 5.0);
    EXPECT_NEAR(alg::wilkinson_shift(SymmetricMatrix{{4, 1}, {1, 2}}), 3 - std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(alg::wilkinson_shift(SymmetricMatrix{{2, 1}, {1, 2}}), 1.0, 1e-15);
    EXPECT_NEAR(alg::wilkinson_shift(JacobiMatrix({7, 4, 2}, {1, 1})), 3 - std::sqrt(2.0), 1e-15);
}

TEST(WilkinsonShift, IsTheCloserEigenvalue) {
    std::mt19937_64 gen(44);
    std::normal_distribution<double> nd;
    for (int t = 0; t < 100; ++t) {
        const double x = nd(gen), y = nd(gen), z = nd(gen);
        const double mu = alg::wilkinson_shift(SymmetricMatrix{{x, y}, {y, z}});
        const double mean = 0.5 * (x + z), rad = std::hypot(0.5 * (x - z), y);
        const double e1 = mean + rad, e2 = mean - rad;
        EXPECT_NEAR(std::min(std::abs(mu - e1), std::abs(mu - e2)), 0.0, 1e-12);
        EXPECT_LE(std::abs(mu - z), std::max(std::abs(e1 - z), std::abs(e2 - z)) + 1e-12);
        EXPECT_LE(std::abs(mu - z), std::min(std::abs(e1 - z), std::abs(e2 - z)) + 1e-12);
    }
}

TEST(QrWilkinsonStep, DiagonalTakesPerturbationPath) {
    const auto d = SymmetricMatrix::diagonal(std::vector<double>{3, 2, 1});
    EXPECT_LT(linalg::max_abs(alg::qr_wilkinson_step(d).dense() - d.dense()), 1e-12);
    const auto j = alg::qr_wilkinson_step(JacobiMatrix({3, 2, 1}, {0, 0}));
    EXPECT_LT(max_abs_diff(j.a, {3, 2, 1}), 1e-12);
    EXPECT_LT(max_abs_value(j.b), 1e-12);
}

TEST(QrWilkinsonStep, CubicOnsetOnTwoByTwo) {
    const SymmetricMatrix m{{4, 1}, {1, 2}};
    const auto next = alg::qr_wilkinson_step(m);
    EXPECT_LT(alg::deflation_epsilon_hat(next, 1), 1e-3);
    // Dense oracle: Gram-Schmidt QR of M - μI.
    const double mu = 3 - std::sqrt(2.0);
    const auto [q, r] = gram_schmidt_qr(SymmetricMatrix{{4 - mu, 1}, {1, 2 - mu}}.dense());
    Matrix expected = r * q;
    for (std::size_t i = 0; i < 2; ++i) expected(i, i) += mu;
    EXPECT_LT(linalg::max_abs(next.dense() - expected), 1e-12);
    EXPECT_LT(linalg::max_abs(alg::qr_wilkinson_step(JacobiMatrix({4, 2}, {1})).to_dense().dense() -
                              expected),
              1e-12);
}

TEST(QrWilkinsonStep, IsospectralOverFiftySteps) {
    ensembles::RngStream rng(45, 0);
    const auto m0 = ensembles::sample_goe(10, rng);
    auto m = m0;
    auto j = linalg::tridiagonal_part(m0);
    const auto j0 = j;
    for (int s = 0; s < 50; ++s) {
        m = alg::qr_wilkinson_step(m);
        j = alg::qr_wilkinson_step(j);
    }
    EXPECT_LT(relative_spectrum_error(m0, m), 1e-11);
    EXPECT_LT(relative_spectrum_error(j0.to_dense(), j.to_dense()), 1e-11);
}

// ----------------------------------------------------------------------- Toda

TEST(TodaStep, DiagonalIsFixedPoint) {
    const auto d = SymmetricMatrix::diagonal(std::vector<double>{2, 1});
    EXPECT_LT(linalg::max_abs(alg::toda_step(d).dense() - d.dense()), 1e-15);
}

TEST(TodaStep, EqualsFlowAtTimeOne) {
    std::mt19937_64 gen(46);
    for (int t = 0; t < 10; ++t) {
        const auto j = random_hermite_jacobi(8, gen);
        const auto step = alg::toda_step(j);
        const auto flow = linalg::flow_solution(linalg::spectral_map(j), GFunction::identity(), 1.0);
        EXPECT_LT(max_abs_diff(step.a, flow.a), 1e-8);
        EXPECT_LT(max_abs_diff(step.b, flow.b), 1e-8);
    }
}

TEST(TodaStep, ConservesTraceInvariants) {
    std::mt19937_64 gen(47);
    const auto m = random_symmetric(6, gen);
    const auto next = alg::toda_step(m);
    double t1 = 0, t1n = 0, t2 = 0, t2n = 0;
    for (std::size_t i = 0; i < 6; ++i) {
        t1 += m(i, i);
        t1n += next(i, i);
        for (std::size_t k = 0; k < 6; ++k) {
            t2 += m(i, k) * m(i, k);
            t2n += next(i, k) * next(i, k);
        }
    }
    EXPECT_NEAR(t1n, t1, 1e-12);
    EXPECT_NEAR(t2n, t2, 1e-11 * std::max(1.0, t2));
}

TEST(TodaStep, PreservesTridiagonalStructure) {
    std::mt19937_64 gen(48);
    const auto j = random_jacobi(7, gen);
    const auto dense = alg::toda_step(j.to_dense());
    for (std::size_t i = 0; i < 7; ++i)
        for (std::size_t k = 0; k + 1 < i; ++k) EXPECT_LT(std::abs(dense(i, k)), 1e-12);
}

TEST(TodaIterator, MatchesRepeatedTodaSteps) {
    std::mt19937_64 gen(49);
    for (std::size_t n : {3u, 6u}) {
        const auto m0 = random_symmetric(n, gen);
        alg::TodaIterator it(m0);
        auto m = m0;
        for (int s = 0; s < 5; ++s) {
            it.step();
            m = alg::toda_step(m);
            EXPECT_LT(linalg::max_abs(it.current().dense() - m.dense()), 1e-9);
        }
    }
}

TEST(FlowIterationEquivalence, QrOfExponentialMatchesToda) {
    // m unshifted QR steps on exp(T₀) equal exp of m Toda steps of T₀.
    std::mt19937_64 gen(50);
    for (std::size_t n : {2u, 4u, 8u}) {
        const auto t0 = random_symmetric(n, gen);
        auto qr = linalg::sym_exp(t0);
        alg::TodaIterator toda(t0);
        for (int m = 1; m <= 5; ++m) {
            qr = alg::qr_step(qr);
            toda.step();
            const auto expected = linalg::sym_exp(toda.current());
            EXPECT_LT(linalg::max_abs(qr.dense() - expected.dense()) / linalg::max_abs(expected.dense()),
                      1e-7)
                << "n=" << n << " m=" << m;
        }
    }
}

// ----------------------------------------------------------------------- sign

TEST(SignMatrix, DiagonalExample) {
    const auto s = alg::sign_matrix(SymmetricMatrix::diagonal(std::vector<double>{2, -3}));
    EXPECT_NEAR(s(0, 0), 1.0, 1e-14);
    EXPECT_NEAR(s(1, 1), -1.0, 1e-14);
    EXPECT_EQ(s(0, 1), 0.0);
}

TEST(SignMatrix, IdentityInOneStep) {
    const auto r = alg::sign_matrix_with_count(SymmetricMatrix::identity(4));
    EXPECT_EQ(r.sign, SymmetricMatrix::identity(4));
    EXPECT_EQ(r.newton_iterations, 1);
}

TEST(SignMatrix, MatchesSpectralOracle) {
    ensembles::RngStream rng(51, 0);
    for (int t = 0; t < 5; ++t) {
        const auto m = ensembles::sample_goe(8, rng);
        const auto dec = linalg::sym_eig_baseline(m);
        const auto oracle = linalg::spectral_function(dec, [](double x) { return x > 0 ? 1.0 : -1.0; });
        const auto s = alg::sign_matrix(m);
        EXPECT_LT(linalg::max_abs(s.dense() - oracle.dense()), 1e-8);
        EXPECT_LT(linalg::max_abs(s.dense() * s.dense() - Matrix::identity(8)), 1e-8);
        EXPECT_LT(linalg::max_abs(s.dense() * m.dense() - m.dense() * s.dense()), 1e-8);
    }
}

TEST(SignMatrix, NearSingularRejected) {
    EXPECT_THROW(alg::sign_matrix(SymmetricMatrix::diagonal(std::vector<double>{1, 1e-12})),
                 NearSingular);
}

TEST(SignDeflate, Examples) {
    const auto a = alg::sign_deflate(SymmetricMatrix::diagonal(std::vector<double>{1, -1}));
    EXPECT_EQ(a.split_index, 1u);
    EXPECT_LT(std::abs(a.block_diagonal(1, 0)), 1e-14);
    const auto b = alg::sign_deflate(SymmetricMatrix{{0, 2}, {2, 0}});
    EXPECT_EQ(b.split_index, 1u);
    EXPECT_NEAR(b.block_diagonal(0, 0), 2.0, 1e-8);
    EXPECT_NEAR(b.block_diagonal(1, 1), -2.0, 1e-8);
    EXPECT_LT(std::abs(b.block_diagonal(1, 0)), 1e-8);
}

TEST(SignDeflate, SplitsGoeAtPositiveCount) {
    ensembles::RngStream rng(52, 0);
    for (int t = 0; t < 5; ++t) {
        const auto m = ensembles::sample_goe(10, rng);
        const auto r = alg::sign_deflate(m);
        const auto lam = linalg::sym_eig_baseline(m).eigenvalues;
        const auto positive = static_cast<std::size_t>(std::count_if(lam.begin(), lam.end(), [](double x) { return x > 0; }));
        EXPECT_EQ(r.split_index, positive);
        double coupling = 0.0;
        for (std::size_t i = r.split_index; i < 10; ++i)
            for (std::size_t j = 0; j < r.split_index; ++j)
                coupling = std::max(coupling, std::abs(r.block_diagonal(i, j)));
        EXPECT_LT(coupling, 1e-8 * linalg::frobenius_norm(m.dense()));
        EXPECT_LT(relative_spectrum_error(m, r.block_diagonal), 1e-8);
    }
}

// ------------------------------------------------------------ run_to_deflation

const std::vector<AlgorithmKind> kAllAlgorithms{AlgorithmKind::QR, AlgorithmKind::QRWilkinson,
                                                AlgorithmKind::Toda, AlgorithmKind::MatrixSign};

TEST(RunToDeflation, DiagonalDeflatesInstantly) {
    const ensembles::InitialMatrix d = SymmetricMatrix::diagonal(std::vector<double>{3, 2, 1});
    for (auto a : kAllAlgorithms) {
        const auto recs = alg::run_to_deflation(d, a, {1e-2}, 100, {});
        ASSERT_EQ(recs.size(), 1u);
        EXPECT_EQ(recs[0].tau, 0.0);
        EXPECT_EQ(recs[0].iota, 1u);
        EXPECT_FALSE(recs[0].censored);
    }
}

TEST(RunToDeflation, TwoByTwoTodaMatchesAnalyticCeiling) {
    const ensembles::InitialMatrix j = JacobiMatrix({0, 0}, {0.5});
    const auto recs = alg::run_to_deflation(j, AlgorithmKind::Toda, {0.1}, 1000, {});
    const double analytic = two_by_two::analytic_tau_2x2({0.5, -0.5, std::numbers::pi / 4}, 0.1);
    EXPECT_NEAR(recs[0].tau, std::ceil(analytic), 1.0);
    EXPECT_EQ(recs[0].iota, 1u);
}

TEST(RunToDeflation, TauNondecreasingAcrossTolerances) {
    ensembles::RngStream rng(53, 0);
    const std::vector<double> eps{1e-2, 1e-4, 1e-6, 1e-8};
    for (auto a : {AlgorithmKind::QR, AlgorithmKind::QRWilkinson, AlgorithmKind::Toda}) {
        for (int t = 0; t < 5; ++t) {
            const ensembles::InitialMatrix m = ensembles::sample_goe(12, rng);
            const auto recs = alg::run_to_deflation(m, a, eps, 10000, {});
            for (std::size_t i = 1; i < recs.size(); ++i) EXPECT_GE(recs[i].tau, recs[i - 1].tau);
            for (const auto& r : recs) {
                EXPECT_FALSE(r.censored);
                EXPECT_GE(r.iota, 1u);
                EXPECT_LE(r.iota, 11u);
            }
        }
    }
}

TEST(RunToDeflation, RecordedIterateSatisfiesCriterionAndPredecessorDoesNot) {
    ensembles::RngStream rng(54, 0);
    const ensembles::InitialMatrix m0 = ensembles::sample_hermite1(10, rng);
    const auto recs = alg::run_to_deflation(m0, AlgorithmKind::QR, {1e-3}, 10000, {});
    ASSERT_FALSE(recs[0].censored);
    auto j = std::get<JacobiMatrix>(m0);
    for (int m = 0; m < static_cast<int>(recs[0].tau); ++m) {
        EXPECT_FALSE(alg::check_deflation(j, 1e-3).has_value());
        j = alg::qr_step(j);
    }
    EXPECT_EQ(alg::check_deflation(j, 1e-3), recs[0].iota);
}

TEST(RunToDeflation, SwapMatrixIsCensored) {
    const ensembles::InitialMatrix p = JacobiMatrix({0, 0}, {1});
    const auto recs = alg::run_to_deflation(p, AlgorithmKind::QR, {1e-2, 1e-4}, 50, {});
    for (const auto& r : recs) {
        EXPECT_TRUE(r.censored);
        EXPECT_EQ(r.tau, 50.0);
        EXPECT_EQ(r.iota, 0u);
    }
}

TEST(RunToDeflation, TransientExampleDeflatesBeforeReordering) {
    // θ₀ just below π/2: the start is nearly diagonal in reversed order.
    const double theta = std::numbers::pi / 2 - 1e-6;
    const auto j = linalg::inverse_spectral_map({{1.0, 0.0}, {std::cos(theta), std::sin(theta)}});
    const auto recs = alg::run_to_deflation(j, AlgorithmKind::Toda, {1e-4}, 100, {});
    EXPECT_EQ(recs[0].tau, 0.0);
    EXPECT_GT(j.a[1], j.a[0]);  // the flow limit orders the diagonal the other way
}

TEST(RunToDeflation, MetadataCopied) {
    const ensembles::InitialMatrix d = SymmetricMatrix::diagonal(std::vector<double>{3, 2, 1});
    const auto recs = alg::run_to_deflation(d, AlgorithmKind::Toda, {1e-2, 1e-3}, 10,
                                            {ensembles::EnsembleKind::Bernoulli, 17, 99});
    for (const auto& r : recs) {
        EXPECT_EQ(r.algorithm, AlgorithmKind::Toda);
        EXPECT_EQ(r.ensemble, ensembles::EnsembleKind::Bernoulli);
        EXPECT_EQ(r.sample_id, 17u);
        EXPECT_EQ(r.seed, 99u);
        EXPECT_EQ(r.n, 3u);
    }
}

TEST(RunToDeflation, RejectsBadTolerances) {
    const ensembles::InitialMatrix d = SymmetricMatrix::diagonal(std::vector<double>{3, 2});
    EXPECT_THROW(alg::run_to_deflation(d, AlgorithmKind::QR, {1e-4, 1e-2}, 10, {}), std::invalid_argument);
    EXPECT_THROW(alg::run_to_deflation(d, AlgorithmKind::QR, {}, 10, {}), std::invalid_argument);
    EXPECT_THROW(alg::run_to_deflation(d, AlgorithmKind::QR, {1e-2}, 0, {}), std::invalid_argument);
}

TEST(RunToDeflation, UnshiftedQrOnGoeDeflatesAtBottom) {
    ensembles::RngStream rng(55, 0);
    int bottom = 0;
    for (int t = 0; t < 40; ++t) {
        const ensembles::InitialMatrix m = ensembles::sample_goe(20, rng);
        bottom += alg::run_to_deflation(m, AlgorithmKind::QR, {1e-8}, 10000, {})[0].iota == 19u;
    }
    EXPECT_GT(bottom, 20);
}

TEST(AlgorithmNames, RoundTrip) {
    for (auto a : kAllAlgorithms) EXPECT_EQ(alg::parse_algorithm(alg::algorithm_name(a)), a);
    EXPECT_FALSE(alg::parse_algorithm("lanczos").has_value());
}

TEST(Iteration, StepsAreIsospectralForEveryAlgorithm) {
    ensembles::RngStream rng(56, 0);
    for (auto a : kAllAlgorithms) {
        for (auto k : {ensembles::EnsembleKind::GOE, ensembles::EnsembleKind::UDSJ}) {
            const auto m0 = ensembles::sample({k}, 12, rng);
            auto it = alg::make_iteration(m0, a);
            for (int s = 0; s < 10; ++s) it->advance();
            EXPECT_LT(relative_spectrum_error(ensembles::to_dense(m0), it->current_dense()), 1e-10)
                << alg::algorithm_name(a);
        }
    }
}

// --------------------------------------------------- continuous deflation time

TEST(ContinuousDeflationTime, AlreadyDeflatedIsZero) {
    const auto s = linalg::spectral_map(JacobiMatrix({1, 0}, {1e-5}));
    EXPECT_EQ(alg::continuous_deflation_time(s, GFunction::identity(), 1e-4), 0.0);
}

TEST(ContinuousDeflationTime, TwoByTwoExample) {
    const double h = 1 / std::sqrt(2.0);
    const double t = alg::continuous_deflation_time({{1, 0}, {h, h}}, GFunction::identity(), 0.1);
    EXPECT_NEAR(t, 2.29243, 1e-5);
    EXPECT_NEAR(t, two_by_two::analytic_tau_2x2({1, 0, std::numbers::pi / 4}, 0.1), 1e-6);
}

TEST(ContinuousDeflationTime, MonotoneInEpsilon) {
    std::mt19937_64 gen(57);
    const auto s = linalg::spectral_map(random_hermite_jacobi(6, gen));
    double prev = 0.0;
    for (double eps : {1e-1, 1e-2, 1e-4, 1e-6}) {
        const double t = alg::continuous_deflation_time(s, GFunction::identity(), eps);
        EXPECT_GE(t, prev);
        prev = t;
    }
}

TEST(ContinuousDeflationTime, StationaryFlowReportsNoDeflation) {
    const double h = 1 / std::sqrt(2.0);
    EXPECT_THROW(alg::continuous_deflation_time({{2, 1}, {h, h}}, GFunction::sign(), 1e-3), NoDeflation);
}

}  // namespace
}  // namespace deflab::testing
