#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "deflab/ensembles/rng.hpp"
#include "deflab/errors.hpp"
#include "deflab/linalg/matrix.hpp"
#include "deflab/linalg/spectral.hpp"

namespace deflab::ensembles {

using linalg::JacobiMatrix;
using linalg::SymmetricMatrix;

enum class EnsembleKind { GOE, GaussianWigner, Bernoulli, Hermite1, UDSJ, JUE };

struct EnsembleSpec {
    EnsembleKind kind = EnsembleKind::GOE;
    /// Gibbs sweeps for UDSJ; 0 selects the default max(50, 10 n).
    unsigned udsj_sweeps = 0;

    bool operator==(const EnsembleSpec&) const = default;
};

inline constexpr std::string_view ensemble_name(EnsembleKind k) noexcept {
    switch (k) {
        case EnsembleKind::GOE: return "goe";
        case EnsembleKind::GaussianWigner: return "gwigner";
        case EnsembleKind::Bernoulli: return "bernoulli";
        case EnsembleKind::Hermite1: return "hermite1";
        case EnsembleKind::UDSJ: return "udsj";
        case EnsembleKind::JUE: return "jue";
    }
    return "?";
}

inline std::optional<EnsembleKind> parse_ensemble(std::string_view s) noexcept {
    for (auto k : {EnsembleKind::GOE, EnsembleKind::GaussianWigner, EnsembleKind::Bernoulli,
                   EnsembleKind::Hermite1, EnsembleKind::UDSJ, EnsembleKind::JUE})
        if (ensemble_name(k) == s) return k;
    return std::nullopt;
}

/// True for the ensembles whose samples are Jacobi matrices.
inline constexpr bool is_tridiagonal(EnsembleKind k) noexcept {
    return k == EnsembleKind::Hermite1 || k == EnsembleKind::UDSJ || k == EnsembleKind::JUE;
}

/// A sampled initial matrix: dense for the full ensembles, tridiagonal otherwise.
using InitialMatrix = std::variant<SymmetricMatrix, JacobiMatrix>;

inline std::size_t matrix_size(const InitialMatrix& m) {
    return std::visit([](const auto& x) { return x.size(); }, m);
}

inline SymmetricMatrix to_dense(const InitialMatrix& m) {
    if (const auto* j = std::get_if<JacobiMatrix>(&m)) return j->to_dense();
    return std::get<SymmetricMatrix>(m);
}

/// Stream identifier of sample `sample_id` of ensemble `kind` at dimension n.
inline std::uint64_t stream_id(EnsembleKind kind, std::size_t n, std::uint64_t sample_id) noexcept {
    std::uint64_t h = hash_string(ensemble_name(kind));
    h = hash_combine(h, n);
    return hash_combine(h, sample_id);
}

namespace detail {

inline void require_positive_n(std::size_t n) {
    if (n == 0) throw std::invalid_argument("ensemble sampler: n must be positive");
}

template <class Entry>
SymmetricMatrix sample_wigner(std::size_t n, Entry&& entry) {
    require_positive_n(n);
    SymmetricMatrix m(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j <= i; ++j) m.set(i, j, entry(i == j));
    return m;
}

}  // namespace detail

/// GOE: diagonal √2·N(0,1), off-diagonal N(0,1).
inline SymmetricMatrix sample_goe(std::size_t n, RngStream& rng) {
    static const double root2 = std::sqrt(2.0);
    return detail::sample_wigner(n, [&](bool diag) { return diag ? root2 * rng.normal() : rng.normal(); });
}

/// Gaussian Wigner: every entry on and below the diagonal N(0,1).
inline SymmetricMatrix sample_gaussian_wigner(std::size_t n, RngStream& rng) {
    return detail::sample_wigner(n, [&](bool) { return rng.normal(); });
}

/// Bernoulli: every entry on and below the diagonal ±1 with equal probability.
inline SymmetricMatrix sample_bernoulli(std::size_t n, RngStream& rng) {
    return detail::sample_wigner(n, [&](bool) { return rng.rademacher(); });
}

/// Hermite-1: a_k ~ N(0, 2), b_k ~ χ_{n-k}; the law of a Householder-tridiagonalized GOE matrix.
inline JacobiMatrix sample_hermite1(std::size_t n, RngStream& rng) {
    detail::require_positive_n(n);
    static const double root2 = std::sqrt(2.0);
    std::vector<double> a(n), b(n - 1);
    for (double& x : a) x = root2 * rng.normal();
    for (std::size_t k = 1; k < n; ++k) {
        // χ_{n-k} >= 0 with probability one positive; redraw the null event.
        do b[k - 1] = rng.chi(static_cast<unsigned>(n - k));
        while (!(b[k - 1] > 0.0));
    }
    return {std::move(a), std::move(b)};
}

inline unsigned default_udsj_sweeps(std::size_t n) noexcept {
    return static_cast<unsigned>(std::max<std::size_t>(50, 10 * n));
}

/// UDSJ: approximately uniform point of the polytope of symmetric doubly stochastic
/// Jacobi matrices, by systematic-scan Gibbs sampling started at b_i = 1/3.
inline JacobiMatrix sample_udsj(std::size_t n, RngStream& rng, unsigned sweeps = 0) {
    if (n < 2) throw std::invalid_argument("sample_udsj: n must be at least 2");
    if (sweeps == 0) sweeps = default_udsj_sweeps(n);
    std::vector<double> b(n - 1, 1.0 / 3.0);
    for (unsigned s = 0; s < sweeps; ++s) {
        for (std::size_t i = 0; i + 1 < n; ++i) {
            const double left = i > 0 ? b[i - 1] : 0.0;
            const double right = i + 2 < n ? b[i + 1] : 0.0;
            b[i] = std::min(1.0 - left, 1.0 - right) * rng.uniform_open();
        }
    }
    std::vector<double> a(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double left = i > 0 ? b[i - 1] : 0.0;
        const double right = i + 1 < n ? b[i] : 0.0;
        a[i] = std::max(0.0, 1.0 - left - right);
    }
    return {std::move(a), std::move(b)};
}

inline constexpr int kJueRetries = 10;

/// JUE: Jacobi matrix with iid Uniform(-2√n, 2√n) eigenvalues and first-row weights
/// uniform on the positive orthant of the sphere.
inline JacobiMatrix sample_jue(std::size_t n, RngStream& rng) {
    detail::require_positive_n(n);
    const double r = 2.0 * std::sqrt(static_cast<double>(n));
    for (int attempt = 0;; ++attempt) {
        linalg::SpectralData s{std::vector<double>(n), std::vector<double>(n)};
        for (double& x : s.lambdas) x = rng.uniform(-r, r);
        std::sort(s.lambdas.begin(), s.lambdas.end(), std::greater<>());
        double norm2 = 0.0;
        for (double& x : s.u) {
            x = std::abs(rng.normal());
            norm2 += x * x;
        }
        for (double& x : s.u) x /= std::sqrt(norm2);
        const bool distinct =
            std::adjacent_find(s.lambdas.begin(), s.lambdas.end(), std::equal_to<>()) ==
            s.lambdas.end();
        const bool positive = std::all_of(s.u.begin(), s.u.end(), [](double x) { return x > 0.0; });
        if (distinct && positive) {
            try {
                return linalg::inverse_spectral_map(s);
            } catch (const ReconstructionFailure&) {
                if (attempt >= kJueRetries) throw;
                continue;
            }
        }
        if (attempt >= kJueRetries)
            throw ReconstructionFailure("sample_jue: retry budget exhausted");
    }
}

/// Draws one initial matrix of the given ensemble.
inline InitialMatrix sample(const EnsembleSpec& spec, std::size_t n, RngStream& rng) {
    switch (spec.kind) {
        case EnsembleKind::GOE: return sample_goe(n, rng);
        case EnsembleKind::GaussianWigner: return sample_gaussian_wigner(n, rng);
        case EnsembleKind::Bernoulli: return sample_bernoulli(n, rng);
        case EnsembleKind::Hermite1: return sample_hermite1(n, rng);
        case EnsembleKind::UDSJ: return sample_udsj(n, rng, spec.udsj_sweeps);
        case EnsembleKind::JUE: return sample_jue(n, rng);
    }
    throw std::invalid_argument("sample: unknown ensemble");
}

}  // namespace deflab::ensembles
