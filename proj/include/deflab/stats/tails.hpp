#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include "deflab/ensembles/rng.hpp"
#include "deflab/errors.hpp"
#include "deflab/stats/descriptive.hpp"

namespace deflab::stats {

/// Tail families. Exponential, Weibull and Gamma describe the excess x - x_min; the
/// Gaussian family is a normal law truncated to x > x_min with free location and scale.
enum class TailFamily { Gaussian, Exponential, Weibull, Gamma };

inline constexpr std::string_view family_name(TailFamily f) noexcept {
    switch (f) {
        case TailFamily::Gaussian: return "gaussian";
        case TailFamily::Exponential: return "exponential";
        case TailFamily::Weibull: return "weibull";
        case TailFamily::Gamma: return "gamma";
    }
    return "?";
}

inline std::optional<TailFamily> parse_family(std::string_view s) noexcept {
    for (auto f : {TailFamily::Gaussian, TailFamily::Exponential, TailFamily::Weibull, TailFamily::Gamma})
        if (family_name(f) == s) return f;
    return std::nullopt;
}

/// Gaussian: (mu, sigma). Exponential: (rate). Weibull: (shape, scale). Gamma: (shape, scale).
struct TailModel {
    TailFamily family = TailFamily::Exponential;
    std::vector<double> params;
    double x_min = 0.0;
};

struct TailFitResult {
    TailFamily family = TailFamily::Exponential;
    std::vector<double> params;
    double x_min = 0.0;
    double ks_stat = 0.0;
    double p_value = std::numeric_limits<double>::quiet_NaN();
    std::size_t n_tail = 0;
    std::size_t n_total = 0;
    std::size_t failed_resamples = 0;
};

inline constexpr std::size_t kMinTailSamples = 20;
inline constexpr double kParamLower = 1e-6;
inline constexpr double kParamUpper = 1e6;

namespace detail {

// log P(Z > z) for a standard normal Z.
inline double log_normal_sf(double z) {
    if (z < 25.0) return std::log(0.5 * std::erfc(z / std::numbers::sqrt2));
    const double z2 = z * z;
    return -0.5 * z2 - std::log(z * std::sqrt(2.0 * std::numbers::pi)) +
           std::log1p(-1.0 / z2 + 3.0 / (z2 * z2));
}

inline double normal_sf(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

inline std::vector<double> tail_of(std::span<const double> values, double x_min) {
    std::vector<double> t;
    for (double x : values)
        if (x > x_min) t.push_back(x);
    return t;
}

template <class F>
double solve_monotone(F f, double lo, double hi) {
    const double flo = f(lo), fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo < 0.0) == (fhi < 0.0)) return std::abs(flo) < std::abs(fhi) ? lo : hi;
    std::uintmax_t iters = 200;
    const auto r = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi,
                                                     boost::math::tools::eps_tolerance<double>(50), iters);
    if (iters >= 200) throw NoConvergence("tail MLE root finder did not converge");
    return 0.5 * (r.first + r.second);
}

inline std::vector<double> fit_exponential(std::span<const double> y) {
    double s = 0.0;
    for (double v : y) s += v;
    const double mean = s / static_cast<double>(y.size());
    return {std::clamp(1.0 / mean, kParamLower, kParamUpper)};
}

inline std::vector<double> fit_weibull(std::span<const double> y) {
    const double n = static_cast<double>(y.size());
    std::vector<double> ly(y.size());
    double mean_log = 0.0, max_log = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < y.size(); ++i) {
        ly[i] = std::log(y[i]);
        mean_log += ly[i];
        max_log = std::max(max_log, ly[i]);
    }
    mean_log /= n;
    // Profile score in the shape k, with y^k rescaled by its maximum.
    auto moments = [&](double k) {
        double s0 = 0.0, s1 = 0.0;
        for (double l : ly) {
            const double w = std::exp(k * (l - max_log));
            s0 += w;
            s1 += w * l;
        }
        return std::pair{s0, s1};
    };
    auto score = [&](double k) {
        const auto [s0, s1] = moments(k);
        return s1 / s0 - 1.0 / k - mean_log;
    };
    const double k = solve_monotone(score, kParamLower, kParamUpper);
    const double s0 = moments(k).first;
    const double scale = std::exp(max_log + std::log(s0 / n) / k);
    return {k, std::clamp(scale, kParamLower, kParamUpper)};
}

inline std::vector<double> fit_gamma(std::span<const double> y) {
    const double n = static_cast<double>(y.size());
    double s = 0.0, sl = 0.0;
    for (double v : y) {
        s += v;
        sl += std::log(v);
    }
    const double mean = s / n;
    const double target = std::log(mean) - sl / n;
    if (!(target > 0.0)) return {kParamUpper, std::clamp(mean / kParamUpper, kParamLower, kParamUpper)};
    auto f = [&](double k) { return std::log(k) - boost::math::digamma(k) - target; };
    const double k = solve_monotone(f, kParamLower, kParamUpper);
    return {k, std::clamp(mean / k, kParamLower, kParamUpper)};
}

// Truncated-normal MLE on x > x_min through a nested Brent search: outer over the
// location, inner over log scale, using the sufficient statistics Σx and Σx².
inline std::vector<double> fit_gaussian(std::span<const double> x, double x_min) {
    const double n = static_cast<double>(x.size());
    double sx = 0.0, sxx = 0.0;
    for (double v : x) sx += v;
    const double mean = sx / n;
    for (double v : x) sxx += (v - mean) * (v - mean);
    const double sd = std::max(std::sqrt(sxx / n), 1e-12);
    // With centred statistics Σ(x-μ)² = sxx + n (mean - μ)².
    auto nll = [&](double mu, double log_sigma) {
        const double sigma = std::exp(log_sigma);
        const double ss = sxx + n * (mean - mu) * (mean - mu);
        return n * log_sigma + ss / (2.0 * sigma * sigma) + n * log_normal_sf((x_min - mu) / sigma);
    };
    const double ls_lo = std::log(std::max(kParamLower, 1e-3 * sd));
    const double ls_hi = std::log(std::min(kParamUpper, 1e3 * sd));
    auto best_log_sigma = [&](double mu) {
        std::uintmax_t it = 200;
        return boost::math::tools::brent_find_minima([&](double ls) { return nll(mu, ls); }, ls_lo,
                                                     ls_hi, 40, it);
    };
    const double mu_lo = x_min - 50.0 * sd, mu_hi = mean + 10.0 * sd;
    std::uintmax_t it = 200;
    const auto outer = boost::math::tools::brent_find_minima(
        [&](double mu) { return best_log_sigma(mu).second; }, mu_lo, mu_hi, 40, it);
    const double mu = outer.first;
    return {mu, std::exp(best_log_sigma(mu).first)};
}

}  // namespace detail

/// Conditional CDF P(X <= x | X > x_min) of the fitted model.
inline double tail_cdf(const TailModel& m, double x) {
    if (x <= m.x_min) return 0.0;
    const double y = x - m.x_min;
    const auto& p = m.params;
    switch (m.family) {
        case TailFamily::Exponential: return -std::expm1(-p[0] * y);
        case TailFamily::Weibull: return -std::expm1(-std::pow(y / p[1], p[0]));
        case TailFamily::Gamma: return boost::math::gamma_p(p[0], y / p[1]);
        case TailFamily::Gaussian: {
            const double a = (m.x_min - p[0]) / p[1], z = (x - p[0]) / p[1];
            // 1 - Q(z)/Q(a), in log space for far tails.
            return -std::expm1(detail::log_normal_sf(z) - detail::log_normal_sf(a));
        }
    }
    return 0.0;
}

/// A draw from the fitted conditional law (inverse CDF).
inline double tail_sample(const TailModel& m, ensembles::RngStream& rng) {
    const double u = rng.uniform_open();
    const auto& p = m.params;
    switch (m.family) {
        case TailFamily::Exponential: return m.x_min - std::log(u) / p[0];
        case TailFamily::Weibull: return m.x_min + p[1] * std::pow(-std::log(u), 1.0 / p[0]);
        case TailFamily::Gamma: return m.x_min + p[1] * boost::math::gamma_q_inv(p[0], u);
        case TailFamily::Gaussian: {
            const double a = (m.x_min - p[0]) / p[1];
            const double q = u * detail::normal_sf(a);
            if (!(q > 0.0)) return m.x_min;  // truncation point beyond double range
            const boost::math::normal_distribution<double> nd;
            const double z = boost::math::quantile(boost::math::complement(nd, q));
            return std::max(m.x_min, p[0] + p[1] * z);
        }
    }
    return m.x_min;
}

/// Conditional maximum-likelihood fit to the values above x_min.
inline TailModel tail_mle(std::span<const double> values, TailFamily family, double x_min) {
    const auto tail = detail::tail_of(values, x_min);
    if (tail.size() < kMinTailSamples)
        throw InsufficientTail("tail_mle: " + std::to_string(tail.size()) + " samples above x_min");
    TailModel m{family, {}, x_min};
    if (family == TailFamily::Gaussian) {
        m.params = detail::fit_gaussian(tail, x_min);
        return m;
    }
    std::vector<double> y(tail.size());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = tail[i] - x_min;
    switch (family) {
        case TailFamily::Exponential: m.params = detail::fit_exponential(y); break;
        case TailFamily::Weibull: m.params = detail::fit_weibull(y); break;
        case TailFamily::Gamma: m.params = detail::fit_gamma(y); break;
        default: break;
    }
    return m;
}

/// Modified KS statistic: sup distance between the empirical CDF of the values above
/// x_min and the fitted conditional CDF.
inline double conditional_ks(std::span<const double> values, const TailModel& m) {
    auto tail = detail::tail_of(values, m.x_min);
    if (tail.empty()) throw InsufficientTail("conditional_ks: empty tail");
    std::sort(tail.begin(), tail.end());
    const double n = static_cast<double>(tail.size());
    double d = 0.0;
    for (std::size_t i = 0; i < tail.size(); ++i) {
        const double f = tail_cdf(m, tail[i]);
        d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
    }
    return d;
}

/// Coefficient c of the screen D < c/sqrt(n_tail) that accepts a candidate cutoff. 1.224 is
/// the 10% asymptotic KS value, which with fitted parameters acts close to a 5% screen.
inline constexpr double kCutoffAcceptance = 1.224;

namespace detail {

// Scans the candidate cutoffs upward and returns the first whose conditional fit is
// not rejected by the KS screen; if every candidate is rejected, the one with the
// smallest conditional KS distance.
inline TailFitResult fit_best_cutoff(std::span<const double> values, TailFamily family) {
    if (values.size() < 2 * kMinTailSamples)
        throw InsufficientTail("choose_xmin: need at least " + std::to_string(2 * kMinTailSamples) +
                               " samples");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    std::optional<TailFitResult> best;
    for (int step = 0; step <= 8; ++step) {
        const double q = 0.50 + 0.05 * step;
        const double x_min = quantile_sorted(sorted, q);
        const auto above = static_cast<std::size_t>(
            sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), x_min));
        if (above < kMinTailSamples) continue;
        const auto model = tail_mle(sorted, family, x_min);
        const double ks = conditional_ks(sorted, model);
        const TailFitResult candidate{family, model.params, x_min, ks,
                                      std::numeric_limits<double>::quiet_NaN(), above, values.size(), 0};
        if (ks < kCutoffAcceptance / std::sqrt(static_cast<double>(above))) return candidate;
        if (!best || ks < best->ks_stat) best = candidate;
    }
    if (!best) throw InsufficientTail("choose_xmin: no candidate cutoff leaves 20 tail samples");
    return *best;
}

}  // namespace detail

/// Cutoff among the 50%, 55%, ..., 90% sample quantiles: the lowest one whose conditional
/// fit passes the KS check, else the one minimizing the modified KS statistic.
inline double choose_xmin(std::span<const double> values, TailFamily family) {
    return detail::fit_best_cutoff(values, family).x_min;
}

/// Fit (x_min, params, KS) without a p-value.
inline TailFitResult fit_tail(std::span<const double> values, TailFamily family) {
    return detail::fit_best_cutoff(values, family);
}

inline constexpr std::size_t kMinResamples = 100;

/// Semiparametric goodness-of-fit p-value for the tail family.
///
/// Each resample keeps the data's split: the body count is drawn with replacement from
/// the values at or below x_min and the tail count from the fitted tail. The resample
/// is refitted from scratch (cutoff included); the p-value is the fraction of resamples
/// whose modified KS statistic exceeds the data's. Resamples whose refit fails count as
/// not exceeding.
inline TailFitResult semiparametric_pvalue(std::span<const double> values, TailFamily family,
                                           std::size_t resamples, const ensembles::RngStream& rng) {
    if (resamples < kMinResamples)
        throw DomainError("semiparametric_pvalue: need at least 100 resamples");
    auto result = detail::fit_best_cutoff(values, family);
    const TailModel model{family, result.params, result.x_min};
    std::vector<double> body;
    for (double x : values)
        if (x <= result.x_min) body.push_back(x);
    const std::size_t n_tail = values.size() - body.size();
    std::size_t exceed = 0, failed = 0;
    std::vector<double> sample(values.size());
    for (std::size_t b = 0; b < resamples; ++b) {
        auto r = rng.split(b);
        std::size_t k = 0;
        for (std::size_t i = 0; i < body.size(); ++i) sample[k++] = body[r.below(body.size())];
        for (std::size_t i = 0; i < n_tail; ++i) sample[k++] = tail_sample(model, r);
        try {
            if (detail::fit_best_cutoff(sample, family).ks_stat > result.ks_stat) ++exceed;
        } catch (const Error&) {
            ++failed;
        }
    }
    result.p_value = static_cast<double>(exceed) / static_cast<double>(resamples);
    result.failed_resamples = failed;
    return result;
}

}  // namespace deflab::stats
