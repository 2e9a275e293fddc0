#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

#include "deflab/algorithms/deflation.hpp"
#include "deflab/algorithms/sign.hpp"
#include "deflab/algorithms/steps.hpp"
#include "deflab/ensembles/ensembles.hpp"
#include "deflab/errors.hpp"
#include "deflab/linalg/spectral.hpp"

namespace deflab::algorithms {

using ensembles::EnsembleKind;
using ensembles::InitialMatrix;
using linalg::GFunction;

enum class AlgorithmKind { QR, QRWilkinson, Toda, MatrixSign };

inline constexpr std::string_view algorithm_name(AlgorithmKind k) noexcept {
    switch (k) {
        case AlgorithmKind::QR: return "qr";
        case AlgorithmKind::QRWilkinson: return "qr_wilkinson";
        case AlgorithmKind::Toda: return "toda";
        case AlgorithmKind::MatrixSign: return "sign";
    }
    return "?";
}

inline std::optional<AlgorithmKind> parse_algorithm(std::string_view s) noexcept {
    for (auto k : {AlgorithmKind::QR, AlgorithmKind::QRWilkinson, AlgorithmKind::Toda,
                   AlgorithmKind::MatrixSign})
        if (algorithm_name(k) == s) return k;
    return std::nullopt;
}

/// g for the algorithms that are time-one maps of a flow (none for shifted QR).
inline std::optional<GFunction> flow_function(AlgorithmKind k) noexcept {
    switch (k) {
        case AlgorithmKind::QR: return GFunction::log();
        case AlgorithmKind::Toda: return GFunction::identity();
        case AlgorithmKind::MatrixSign: return GFunction::sign();
        case AlgorithmKind::QRWilkinson: return std::nullopt;
    }
    return std::nullopt;
}

/// One sample's outcome at one tolerance. `tau` is an iteration count for the discrete
/// algorithms. Censored rows have tau == cap and iota == 0.
struct DeflationRecord {
    AlgorithmKind algorithm = AlgorithmKind::QR;
    EnsembleKind ensemble = EnsembleKind::GOE;
    std::size_t n = 0;
    double epsilon = 0.0;
    std::uint64_t sample_id = 0;
    std::uint64_t seed = 0;
    double tau = 0.0;
    std::size_t iota = 0;
    bool censored = false;

    bool operator==(const DeflationRecord&) const = default;
};

struct RunMetadata {
    EnsembleKind ensemble = EnsembleKind::GOE;
    std::uint64_t sample_id = 0;
    std::uint64_t seed = 0;
};

/// An algorithm applied to one initial matrix: the iterate L_m and a way to advance it.
class Iteration {
public:
    virtual ~Iteration() = default;
    virtual DeflationStatus status() const = 0;
    virtual void advance() = 0;
    virtual SymmetricMatrix current_dense() const = 0;
    /// True when further steps cannot change the iterate.
    virtual bool stationary() const { return false; }
};

namespace detail {

class TridiagonalQR final : public Iteration {
public:
    TridiagonalQR(JacobiMatrix m, bool shifted) : m_(std::move(m)), shifted_(shifted) {}
    DeflationStatus status() const override { return deflation_status(all_epsilon_hats(m_)); }
    void advance() override { m_ = shifted_ ? qr_wilkinson_step(m_) : qr_step(m_); }
    SymmetricMatrix current_dense() const override { return m_.to_dense(); }

private:
    JacobiMatrix m_;
    bool shifted_;
};

class DenseQR final : public Iteration {
public:
    DenseQR(SymmetricMatrix m, bool shifted) : m_(std::move(m)), shifted_(shifted) {}
    DeflationStatus status() const override { return deflation_status(all_epsilon_hats(m_)); }
    void advance() override { m_ = shifted_ ? qr_wilkinson_step(m_) : qr_step(m_); }
    SymmetricMatrix current_dense() const override { return m_; }

private:
    SymmetricMatrix m_;
    bool shifted_;
};

// Toda through TodaIterator. Iterate 0 is the input itself; tridiagonal inputs keep
// the tridiagonal criterion ε̂_k = b_k.
class Toda final : public Iteration {
public:
    explicit Toda(const InitialMatrix& m)
        : tridiagonal_(std::holds_alternative<JacobiMatrix>(m)),
          current_(ensembles::to_dense(m)),
          it_(current_) {}
    DeflationStatus status() const override {
        if (tridiagonal_) return deflation_status(all_epsilon_hats(linalg::tridiagonal_part(current_)));
        return deflation_status(all_epsilon_hats(current_));
    }
    void advance() override {
        it_.step();
        current_ = it_.current();
    }
    SymmetricMatrix current_dense() const override { return current_; }

private:
    bool tridiagonal_;
    SymmetricMatrix current_;
    TodaIterator it_;
};

// Matrix-sign algorithm: iterate m >= 1 is U_mᵀ L₀ U_m with U_m adapted to the
// approximate projector (I + X_m)/2 of the m-th Newton iterate X_m.
class Sign final : public Iteration {
public:
    explicit Sign(const InitialMatrix& m)
        : l0_(ensembles::to_dense(m)), current_(l0_), newton_(l0_) {}
    DeflationStatus status() const override { return deflation_status(all_epsilon_hats(current_)); }
    void advance() override {
        if (stationary()) return;
        last_change_ = newton_.step();
        if (newton_.steps() > kMaxNewtonSteps) throw NoConvergence("sign run: Newton budget exhausted");
        const auto basis = projector_basis(newton_.current());
        current_ = SymmetricMatrix::symmetrized(
            linalg::transpose_times(basis.u, l0_.dense() * basis.u));
    }
    SymmetricMatrix current_dense() const override { return current_; }
    bool stationary() const override { return last_change_ < kNewtonTolerance; }

private:
    SymmetricMatrix l0_;
    SymmetricMatrix current_;
    SignNewton newton_;
    double last_change_ = std::numeric_limits<double>::infinity();
};

}  // namespace detail

inline std::unique_ptr<Iteration> make_iteration(const InitialMatrix& m, AlgorithmKind algorithm) {
    if (ensembles::matrix_size(m) < 2)
        throw std::invalid_argument("make_iteration: deflation needs n >= 2");
    switch (algorithm) {
        case AlgorithmKind::QR:
        case AlgorithmKind::QRWilkinson: {
            const bool shifted = algorithm == AlgorithmKind::QRWilkinson;
            if (const auto* j = std::get_if<JacobiMatrix>(&m))
                return std::make_unique<detail::TridiagonalQR>(*j, shifted);
            return std::make_unique<detail::DenseQR>(std::get<SymmetricMatrix>(m), shifted);
        }
        case AlgorithmKind::Toda: return std::make_unique<detail::Toda>(m);
        case AlgorithmKind::MatrixSign: return std::make_unique<detail::Sign>(m);
    }
    throw std::invalid_argument("make_iteration: unknown algorithm");
}

inline constexpr std::size_t kDefaultIterationCap = 10000;

/// Advances one initial matrix until every tolerance in `epsilons` (strictly decreasing)
/// is undercut, checking the criterion at iterates 0, 1, ..., cap - 1. One record per
/// tolerance; tolerances not reached, or abandoned because a step failed numerically,
/// are censored.
inline std::vector<DeflationRecord> run_to_deflation(const InitialMatrix& m0, AlgorithmKind algorithm,
                                                     const std::vector<double>& epsilons,
                                                     std::size_t cap, const RunMetadata& meta) {
    if (epsilons.empty()) throw std::invalid_argument("run_to_deflation: no tolerances");
    for (std::size_t i = 0; i < epsilons.size(); ++i) {
        if (!(epsilons[i] > 0.0) || !std::isfinite(epsilons[i]))
            throw std::invalid_argument("run_to_deflation: tolerances must be positive");
        if (i > 0 && !(epsilons[i] < epsilons[i - 1]))
            throw std::invalid_argument("run_to_deflation: tolerances must be strictly decreasing");
    }
    if (cap < 1) throw std::invalid_argument("run_to_deflation: cap must be at least 1");

    const std::size_t n = ensembles::matrix_size(m0);
    std::vector<DeflationRecord> out(epsilons.size());
    for (std::size_t i = 0; i < epsilons.size(); ++i) {
        auto& r = out[i];
        r.algorithm = algorithm;
        r.ensemble = meta.ensemble;
        r.n = n;
        r.epsilon = epsilons[i];
        r.sample_id = meta.sample_id;
        r.seed = meta.seed;
        r.tau = static_cast<double>(cap);
        r.censored = true;
    }
    std::size_t next = 0;  // first tolerance not yet undercut
    try {
        auto it = make_iteration(m0, algorithm);
        for (std::size_t m = 0; m < cap && next < epsilons.size(); ++m) {
            const auto s = it->status();
            while (next < epsilons.size() && s.min_epsilon_hat < epsilons[next]) {
                out[next].tau = static_cast<double>(m);
                out[next].iota = s.index;
                out[next].censored = false;
                ++next;
            }
            if (next == epsilons.size() || m + 1 == cap || it->stationary()) break;
            it->advance();
        }
    } catch (const Error&) {
        // Remaining tolerances stay censored.
    }
    return out;
}

inline constexpr double kContinuousTimeLimit = 1e4;

/// inf { t > 0 : min_k ε̂_k(L(t)) < ε } along the flow generated by g from S^{-1}(s).
/// Scans t on a grid of step 0.25 / (g(λ₁) - g(λₙ)) and bisects the first bracket to a
/// relative width of 1e-9.
inline double continuous_deflation_time(const linalg::SpectralData& s, GFunction g, double epsilon,
                                        double t_max = kContinuousTimeLimit) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("continuous_deflation_time: epsilon must be positive");
    if (s.size() < 2) throw std::invalid_argument("continuous_deflation_time: need n >= 2");
    auto deflated = [&](double t) {
        const auto j = linalg::flow_solution(s, g, t);
        double b = std::numeric_limits<double>::infinity();
        for (double x : j.b) b = std::min(b, x);
        return b < epsilon;
    };
    if (deflated(0.0)) return 0.0;
    const double spread = g(s.lambdas.front()) - g(s.lambdas.back());
    if (!(spread > 0.0)) throw NoDeflation("flow is stationary and the start is not deflated");
    const double h = 0.25 / spread;
    double lo = 0.0;
    for (std::size_t k = 1;; ++k) {
        const double t = static_cast<double>(k) * h;
        if (t > t_max) throw NoDeflation("no deflation before t_max");
        if (deflated(t)) {
            double hi = t;
            while (hi - lo > 1e-9 * hi) {
                const double mid = 0.5 * (lo + hi);
                if (deflated(mid)) hi = mid;
                else lo = mid;
            }
            return hi;
        }
        lo = t;
    }
}

}  // namespace deflab::algorithms
