#pragma once

#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "deflab/errors.hpp"
#include "deflab/linalg/matrix.hpp"

namespace deflab::linalg {

/// Q R = M with Q orthogonal and R upper triangular with strictly positive diagonal.
struct QRFactors {
    Matrix q;
    Matrix r;
};

/// Column-pivoted factorization M P = Q R; `perm[j]` is the original index of column j.
struct PivotedQR {
    Matrix q;
    Matrix r;
    std::vector<std::size_t> perm;
};

/// Diagonal entries of R smaller than this in magnitude are treated as exact zeros.
inline constexpr double kRankThreshold = 1e-300;

namespace detail {

// Householder vector for x (in place): on return x holds v with v[0] adjusted,
// returns beta = 2 / vᵀv (0 when x[1:] is already zero) and writes the new leading entry.
inline double make_reflector(std::span<double> x, double& alpha) {
    double scale = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i) scale = std::max(scale, std::abs(x[i]));
    if (scale == 0.0) {
        // Nothing below the diagonal: identity reflector.
        alpha = x[0];
        return 0.0;
    }
    scale = std::max(scale, std::abs(x[0]));
    double ssq = 0.0;
    for (double v : x) ssq += (v / scale) * (v / scale);
    const double norm = scale * std::sqrt(ssq);
    alpha = x[0] >= 0.0 ? -norm : norm;
    x[0] -= alpha;
    double vtv = 0.0;
    for (double v : x) vtv += v * v;
    return vtv == 0.0 ? 0.0 : 2.0 / vtv;
}

struct Reflectors {
    std::vector<std::vector<double>> v;
    std::vector<double> beta;
};

// Reduces a (m x n, m >= n) to upper-triangular form in place, returning the reflectors.
inline Reflectors householder_reduce(Matrix& a) {
    const std::size_t m = a.rows(), n = a.cols();
    Reflectors refl;
    const std::size_t steps = std::min(m > 0 ? m - 1 : 0, n);
    refl.v.reserve(steps);
    refl.beta.reserve(steps);
    std::vector<double> w(n);
    for (std::size_t k = 0; k < steps; ++k) {
        std::vector<double> v(m - k);
        for (std::size_t i = k; i < m; ++i) v[i - k] = a(i, k);
        double alpha = 0.0;
        const double beta = make_reflector(v, alpha);
        if (beta != 0.0) {
            // a[k:, k:] -= beta v (vᵀ a[k:, k:])
            std::fill(w.begin() + static_cast<std::ptrdiff_t>(k), w.end(), 0.0);
            for (std::size_t i = k; i < m; ++i) {
                const double vi = v[i - k];
                auto ai = a.row(i);
                for (std::size_t j = k + 1; j < n; ++j) w[j] += vi * ai[j];
            }
            for (std::size_t i = k; i < m; ++i) {
                const double f = beta * v[i - k];
                auto ai = a.row(i);
                for (std::size_t j = k + 1; j < n; ++j) ai[j] -= f * w[j];
            }
            a(k, k) = alpha;
            for (std::size_t i = k + 1; i < m; ++i) a(i, k) = 0.0;
        }
        refl.v.push_back(std::move(v));
        refl.beta.push_back(beta);
    }
    return refl;
}

// Forms the first `cols` columns of H_0 H_1 ... H_{p-1}.
inline Matrix accumulate_q(const Reflectors& refl, std::size_t m, std::size_t cols) {
    Matrix q(m, cols);
    for (std::size_t i = 0; i < std::min(m, cols); ++i) q(i, i) = 1.0;
    std::vector<double> w(cols);
    for (std::size_t kk = refl.v.size(); kk-- > 0;) {
        const double beta = refl.beta[kk];
        if (beta == 0.0) continue;
        const auto& v = refl.v[kk];
        std::fill(w.begin(), w.end(), 0.0);
        for (std::size_t i = kk; i < m; ++i) {
            const double vi = v[i - kk];
            auto qi = q.row(i);
            for (std::size_t j = 0; j < cols; ++j) w[j] += vi * qi[j];
        }
        for (std::size_t i = kk; i < m; ++i) {
            const double f = beta * v[i - kk];
            auto qi = q.row(i);
            for (std::size_t j = 0; j < cols; ++j) qi[j] -= f * w[j];
        }
    }
    return q;
}

// Flips signs so that diag(R) >= 0: row i of R and column i of Q.
inline void normalize_signs(Matrix& q, Matrix& r) {
    for (std::size_t i = 0; i < r.rows() && i < r.cols(); ++i) {
        if (r(i, i) >= 0.0) continue;
        for (std::size_t j = i; j < r.cols(); ++j) r(i, j) = -r(i, j);
        for (std::size_t k = 0; k < q.rows(); ++k) q(k, i) = -q(k, i);
    }
}

}  // namespace detail

/// Householder QR of a square matrix with the positive-diagonal convention, which makes
/// the factorization unique. Throws RankDeficient when some |R_ii| < kRankThreshold.
inline QRFactors qr_factor(const Matrix& m) {
    if (!m.square() || m.rows() == 0) throw std::invalid_argument("qr_factor: need a square matrix");
    const std::size_t n = m.rows();
    Matrix r = m;
    const auto refl = detail::householder_reduce(r);
    Matrix q = detail::accumulate_q(refl, n, n);
    detail::normalize_signs(q, r);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(std::abs(r(i, i)) >= kRankThreshold))
            throw RankDeficient("|R(" + std::to_string(i) + "," + std::to_string(i) +
                                ")| below threshold");
    }
    return {std::move(q), std::move(r)};
}

inline QRFactors qr_factor(const SymmetricMatrix& m) { return qr_factor(m.dense()); }

/// Householder QR with greedy column pivoting. Returns the full square Q; no rank check.
inline PivotedQR qr_factor_pivoted(const Matrix& m) {
    if (!m.square() || m.rows() == 0)
        throw std::invalid_argument("qr_factor_pivoted: need a square matrix");
    const std::size_t n = m.rows();
    Matrix a = m;
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    detail::Reflectors refl;
    std::vector<double> w(n);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        std::size_t best = k;
        double best_norm = -1.0;
        for (std::size_t j = k; j < n; ++j) {
            double s = 0.0;
            for (std::size_t i = k; i < n; ++i) s += a(i, j) * a(i, j);
            if (s > best_norm) {
                best_norm = s;
                best = j;
            }
        }
        if (best != k) {
            for (std::size_t i = 0; i < n; ++i) std::swap(a(i, k), a(i, best));
            std::swap(perm[k], perm[best]);
        }
        std::vector<double> v(n - k);
        for (std::size_t i = k; i < n; ++i) v[i - k] = a(i, k);
        double alpha = 0.0;
        const double beta = detail::make_reflector(v, alpha);
        if (beta != 0.0) {
            std::fill(w.begin(), w.end(), 0.0);
            for (std::size_t i = k; i < n; ++i)
                for (std::size_t j = k + 1; j < n; ++j) w[j] += v[i - k] * a(i, j);
            for (std::size_t i = k; i < n; ++i)
                for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= beta * v[i - k] * w[j];
            a(k, k) = alpha;
            for (std::size_t i = k + 1; i < n; ++i) a(i, k) = 0.0;
        }
        refl.v.push_back(std::move(v));
        refl.beta.push_back(beta);
    }
    Matrix q = detail::accumulate_q(refl, n, n);
    detail::normalize_signs(q, a);
    return {std::move(q), std::move(a), std::move(perm)};
}

/// Ordinary least squares min ||X c - y|| for a tall design X (rows >= cols).
/// Throws RankDeficient when X is numerically rank deficient.
inline std::vector<double> least_squares(const Matrix& x, std::span<const double> y) {
    const std::size_t m = x.rows(), n = x.cols();
    if (m < n || y.size() != m) throw std::invalid_argument("least_squares: shape mismatch");
    Matrix aug(m, n + 1);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) aug(i, j) = x(i, j);
        aug(i, n) = y[i];
    }
    // Reflectors are computed from the first n columns only; column n rides along as Qᵀy.
    Matrix r = aug;
    const std::size_t steps = std::min(m > 0 ? m - 1 : 0, n);
    double scale = 0.0;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) scale = std::max(scale, std::abs(x(i, j)));
    std::vector<double> w(n + 1);
    for (std::size_t k = 0; k < steps; ++k) {
        std::vector<double> v(m - k);
        for (std::size_t i = k; i < m; ++i) v[i - k] = r(i, k);
        double alpha = 0.0;
        const double beta = detail::make_reflector(v, alpha);
        if (beta == 0.0) continue;
        std::fill(w.begin(), w.end(), 0.0);
        for (std::size_t i = k; i < m; ++i)
            for (std::size_t j = k + 1; j <= n; ++j) w[j] += v[i - k] * r(i, j);
        for (std::size_t i = k; i < m; ++i)
            for (std::size_t j = k + 1; j <= n; ++j) r(i, j) -= beta * v[i - k] * w[j];
        r(k, k) = alpha;
        for (std::size_t i = k + 1; i < m; ++i) r(i, k) = 0.0;
    }
    std::vector<double> c(n);
    for (std::size_t kk = n; kk-- > 0;) {
        if (std::abs(r(kk, kk)) <= 1e-12 * scale * std::sqrt(static_cast<double>(m)))
            throw RankDeficient("least_squares: design matrix is rank deficient");
        double s = r(kk, n);
        for (std::size_t j = kk + 1; j < n; ++j) s -= r(kk, j) * c[j];
        c[kk] = s / r(kk, kk);
    }
    return c;
}

}  // namespace deflab::linalg
