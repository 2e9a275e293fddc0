#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <string_view>

#include "deflab/ensembles/rng.hpp"
#include "deflab/errors.hpp"

namespace deflab::two_by_two {

/// Spectral coordinates of a 2x2 Jacobi matrix: λ₁ > λ₂ and u = (cos θ₀, sin θ₀).
struct TwoByTwoSpectral {
    double lambda1 = 1.0;
    double lambda2 = 0.0;
    double theta0 = std::numbers::pi / 4;

    void validate() const {
        if (!(lambda1 > lambda2) || !std::isfinite(lambda1) || !std::isfinite(lambda2))
            throw std::invalid_argument("TwoByTwoSpectral: need finite lambda1 > lambda2");
        if (!(theta0 > 0.0 && theta0 < std::numbers::pi / 2))
            throw std::invalid_argument("TwoByTwoSpectral: theta0 must lie in (0, pi/2)");
    }

    /// Off-diagonal entry at t = 0: (λ₁ - λ₂) sin θ₀ cos θ₀.
    double m12() const { return (lambda1 - lambda2) * std::sin(theta0) * std::cos(theta0); }
};

/// Deflation time of the 2x2 Toda flow. Along the flow tan θ(t) = tan θ₀ e^{-(λ₁-λ₂)t}
/// and m₁₂ = (λ₁ - λ₂) / (2 cosh log tan θ), so
///   (λ₁ - λ₂) τ = log tan θ₀ + acosh((λ₁ - λ₂) / (2ε))   when m₁₂(0) > ε, else 0.
inline double analytic_tau_2x2(const TwoByTwoSpectral& s, double epsilon) {
    s.validate();
    if (!(epsilon > 0.0)) throw std::invalid_argument("analytic_tau_2x2: epsilon must be positive");
    if (s.m12() <= epsilon) return 0.0;
    const double gap = s.lambda1 - s.lambda2;
    const double ratio = gap / (2.0 * epsilon);
    if (!(ratio > 1.0)) throw DomainError("analytic_tau_2x2: epsilon >= (lambda1 - lambda2) / 2");
    const double t = (std::log(std::tan(s.theta0)) + std::acosh(ratio)) / gap;
    return std::max(t, 0.0);
}

enum class Kind { GOE2, JUEUnit };

inline constexpr std::string_view kind_name(Kind k) noexcept {
    return k == Kind::GOE2 ? "goe2" : "jue";
}

inline std::optional<Kind> parse_kind(std::string_view s) noexcept {
    if (s == "goe2" || s == "goe") return Kind::GOE2;
    if (s == "jue" || s == "jue-unit" || s == "jue_unit") return Kind::JUEUnit;
    return std::nullopt;
}

/// Draw from the 2x2 spectral law of the given kind.
///
/// GOE2: density ∝ exp(-(λ₁² + λ₂²)/4)(λ₁ - λ₂) on λ₁ > λ₂. In the rotated coordinates
/// s = (λ₁ + λ₂)/√2, d = (λ₁ - λ₂)/√2 it factorizes into s ~ N(0, 2) and a Rayleigh
/// variate d with density ∝ d e^{-d²/4}, both sampled exactly.
/// JUE-unit: λ₁ > λ₂ the order statistics of two Uniform(-1, 1) draws.
/// In both cases θ₀ ~ Uniform(0, π/2).
inline TwoByTwoSpectral sample_2x2(Kind kind, ensembles::RngStream& rng) {
    TwoByTwoSpectral s;
    do {
        if (kind == Kind::GOE2) {
            const double sum = std::numbers::sqrt2 * rng.normal();
            const double diff = std::sqrt(-4.0 * std::log(rng.uniform_open()));
            s.lambda1 = (sum + diff) / std::numbers::sqrt2;
            s.lambda2 = (sum - diff) / std::numbers::sqrt2;
        } else {
            const double x = rng.uniform(-1.0, 1.0), y = rng.uniform(-1.0, 1.0);
            s.lambda1 = std::max(x, y);
            s.lambda2 = std::min(x, y);
        }
    } while (!(s.lambda1 > s.lambda2));
    s.theta0 = 0.5 * std::numbers::pi * rng.uniform_open();
    return s;
}

struct MonteCarloEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t samples = 0;
};

/// Sample mean of analytic_tau_2x2 over `samples` draws, with its standard error.
inline MonteCarloEstimate mc_mean_tau_2x2(Kind kind, double epsilon, std::size_t samples,
                                          ensembles::RngStream& rng) {
    if (samples < 100) throw std::invalid_argument("mc_mean_tau_2x2: need at least 100 samples");
    // Welford accumulation.
    double mean = 0.0, m2 = 0.0;
    for (std::size_t i = 0; i < samples; ++i) {
        const double tau = analytic_tau_2x2(sample_2x2(kind, rng), epsilon);
        const double delta = tau - mean;
        mean += delta / static_cast<double>(i + 1);
        m2 += delta * (tau - mean);
    }
    const double var = m2 / static_cast<double>(samples - 1);
    return {mean, std::sqrt(var / static_cast<double>(samples)), samples};
}

}  // namespace deflab::two_by_two
