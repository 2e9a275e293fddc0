#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "deflab/errors.hpp"
#include "deflab/linalg/matrix.hpp"

namespace deflab::algorithms {

using linalg::JacobiMatrix;
using linalg::SymmetricMatrix;

namespace detail {

inline void check_split_index(std::size_t n, std::size_t k) {
    if (k < 1 || k + 1 > n)
        throw IndexOutOfRange("split index " + std::to_string(k) + " outside [1, " +
                              std::to_string(n > 0 ? n - 1 : 0) + "]");
}

inline double split_weight(std::size_t n, std::size_t k) {
    return std::sqrt(static_cast<double>(k) * static_cast<double>(n - k));
}

}  // namespace detail

/// ε̂_k for a tridiagonal matrix: the coupling entry b_k (k is 1-based).
inline double deflation_epsilon_hat(const JacobiMatrix& m, std::size_t k) {
    detail::check_split_index(m.size(), k);
    return std::abs(m.b[k - 1]);
}

/// ε̂_k for a full symmetric matrix: √(k(n-k)) max |l_ij| over i > k, j <= k (1-based).
inline double deflation_epsilon_hat(const SymmetricMatrix& m, std::size_t k) {
    const std::size_t n = m.size();
    detail::check_split_index(n, k);
    double big = 0.0;
    for (std::size_t i = k; i < n; ++i)
        for (std::size_t j = 0; j < k; ++j) big = std::max(big, std::abs(m(i, j)));
    return detail::split_weight(n, k) * big;
}

/// ε̂_1 .. ε̂_{n-1}, stored at positions 0 .. n-2.
inline std::vector<double> all_epsilon_hats(const JacobiMatrix& m) {
    std::vector<double> out(m.b.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::abs(m.b[i]);
    return out;
}

/// All split indices of a full matrix in O(n²): entry (i, j), i > j, lies in the
/// coupling block of every k with j < k <= i, so a running prefix maximum along each
/// row, merged from the bottom row upward, yields every block maximum.
inline std::vector<double> all_epsilon_hats(const SymmetricMatrix& m) {
    const std::size_t n = m.size();
    if (n < 2) return {};
    std::vector<double> block(n, 0.0);  // block[k] for k = 1..n-1
    for (std::size_t i = 1; i < n; ++i) {
        auto row = m.dense().row(i);
        double prefix = 0.0;
        for (std::size_t k = 1; k <= i; ++k) {
            prefix = std::max(prefix, std::abs(row[k - 1]));
            block[k] = std::max(block[k], prefix);
        }
    }
    std::vector<double> out(n - 1);
    for (std::size_t k = 1; k < n; ++k) out[k - 1] = detail::split_weight(n, k) * block[k];
    return out;
}

/// Smallest ε̂ and its split index (1-based; smallest index on exact ties).
struct DeflationStatus {
    double min_epsilon_hat = std::numeric_limits<double>::infinity();
    std::size_t index = 0;
};

inline DeflationStatus deflation_status(const std::vector<double>& hats) {
    DeflationStatus s;
    for (std::size_t i = 0; i < hats.size(); ++i) {
        if (hats[i] < s.min_epsilon_hat) {
            s.min_epsilon_hat = hats[i];
            s.index = i + 1;
        }
    }
    return s;
}

/// The argmin split index if some ε̂_k < epsilon, otherwise nothing.
template <class M>
std::optional<std::size_t> check_deflation(const M& m, double epsilon) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("check_deflation: epsilon must be positive");
    const auto s = deflation_status(all_epsilon_hats(m));
    if (s.index != 0 && s.min_epsilon_hat < epsilon) return s.index;
    return std::nullopt;
}

}  // namespace deflab::algorithms
