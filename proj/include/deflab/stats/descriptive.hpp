#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "deflab/errors.hpp"

namespace deflab::stats {

/// Neumaier-compensated sum of the values taken in ascending order, so the result does
/// not depend on the order in which the values were supplied.
inline double stable_sum(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    double s = 0.0, c = 0.0;
    for (double x : v) {
        const double t = s + x;
        c += std::abs(s) >= std::abs(x) ? (s - t) + x : (x - t) + s;
        s = t;
    }
    return s + c;
}

struct MeanSd {
    double mean = 0.0;
    double sd = 0.0;  // denominator N - 1; 0 for a single value
    std::size_t count = 0;
};

inline MeanSd mean_sd(std::span<const double> values) {
    MeanSd out;
    out.count = values.size();
    if (values.empty()) return out;
    std::vector<double> v(values.begin(), values.end());
    out.mean = stable_sum(v) / static_cast<double>(v.size());
    if (v.size() < 2) return out;
    for (double& x : v) x = (x - out.mean) * (x - out.mean);
    out.sd = std::sqrt(stable_sum(std::move(v)) / static_cast<double>(values.size() - 1));
    return out;
}

/// (x - mean) / sd with the N - 1 standard deviation.
inline std::vector<double> normalize(std::span<const double> values) {
    if (values.size() < 2) throw ZeroVariance("normalize: need at least two values");
    const auto m = mean_sd(values);
    if (!(m.sd > 0.0)) throw ZeroVariance("normalize: sample standard deviation is zero");
    std::vector<double> out(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) out[i] = (values[i] - m.mean) / m.sd;
    return out;
}

/// Empirical quantile by linear interpolation between order statistics (sorted input).
inline double quantile_sorted(std::span<const double> sorted, double q) {
    if (sorted.empty()) throw std::invalid_argument("quantile: empty sample");
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

struct HistogramData {
    std::vector<double> edges;      // bins + 1 uniformly spaced edges
    std::vector<std::size_t> counts;
    std::vector<double> densities;  // count / (N · width)

    double width() const { return edges.size() > 1 ? edges[1] - edges[0] : 0.0; }
};

inline constexpr std::size_t kMinFreedmanDiaconisBins = 10;
inline constexpr std::size_t kMaxHistogramBins = 10000;

/// Freedman-Diaconis bin count 2·IQR·N^{-1/3}, at least 10.
inline std::size_t freedman_diaconis_bins(std::span<const double> values) {
    if (values.size() < 2) return kMinFreedmanDiaconisBins;
    std::vector<double> v(values.begin(), values.end());
    std::sort(v.begin(), v.end());
    const double iqr = quantile_sorted(v, 0.75) - quantile_sorted(v, 0.25);
    const double range = v.back() - v.front();
    if (!(iqr > 0.0) || !(range > 0.0)) return kMinFreedmanDiaconisBins;
    const double h = 2.0 * iqr / std::cbrt(static_cast<double>(v.size()));
    const double bins = std::ceil(range / h);
    return std::clamp(static_cast<std::size_t>(bins), kMinFreedmanDiaconisBins, kMaxHistogramBins);
}

/// Area-normalized histogram on uniform bins spanning [min, max] (a unit-width window
/// centred on the value when all values coincide).
inline HistogramData histogram(std::span<const double> values, std::size_t bins) {
    if (bins < 1) throw std::invalid_argument("histogram: need at least one bin");
    if (values.empty()) throw std::invalid_argument("histogram: empty sample");
    auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    double lo = *lo_it, hi = *hi_it;
    if (!(hi > lo)) {
        lo -= 0.5;
        hi += 0.5;
    }
    HistogramData h;
    h.edges.resize(bins + 1);
    const double w = (hi - lo) / static_cast<double>(bins);
    for (std::size_t i = 0; i <= bins; ++i) h.edges[i] = lo + w * static_cast<double>(i);
    h.edges.back() = hi;
    h.counts.assign(bins, 0);
    for (double x : values) {
        auto b = static_cast<std::size_t>((x - lo) / w);
        h.counts[std::min(b, bins - 1)] += 1;
    }
    h.densities.resize(bins);
    const double total = static_cast<double>(values.size()) * w;
    for (std::size_t i = 0; i < bins; ++i) h.densities[i] = static_cast<double>(h.counts[i]) / total;
    return h;
}

inline HistogramData histogram(std::span<const double> values) {
    return histogram(values, freedman_diaconis_bins(values));
}

/// Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b|.
inline double ks_two_sample(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
    std::vector<double> x(a.begin(), a.end()), y(b.begin(), b.end());
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    const double na = static_cast<double>(x.size()), nb = static_cast<double>(y.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < x.size() && j < y.size()) {
        const double v = std::min(x[i], y[j]);
        while (i < x.size() && x[i] == v) ++i;
        while (j < y.size() && y[j] == v) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

/// c·√((n + m)/(n m)); c = 1.36 (5%) or 1.63 (1%).
inline double ks_critical_value(double c, std::size_t n, std::size_t m) {
    const double dn = static_cast<double>(n), dm = static_cast<double>(m);
    return c * std::sqrt((dn + dm) / (dn * dm));
}

}  // namespace deflab::stats
