#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <vector>

namespace deflab::linalg {

/// Dense row-major real matrix.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    Matrix(std::initializer_list<std::initializer_list<double>> rows) {
        rows_ = rows.size();
        cols_ = rows_ == 0 ? 0 : rows.begin()->size();
        data_.reserve(rows_ * cols_);
        for (const auto& r : rows) {
            if (r.size() != cols_) throw std::invalid_argument("Matrix: ragged initializer");
            data_.insert(data_.end(), r.begin(), r.end());
        }
    }

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool square() const noexcept { return rows_ == cols_; }

    double& operator()(std::size_t i, std::size_t j) noexcept {
        assert(i < rows_ && j < cols_);
        return data_[i * cols_ + j];
    }
    double operator()(std::size_t i, std::size_t j) const noexcept {
        assert(i < rows_ && j < cols_);
        return data_[i * cols_ + j];
    }

    std::span<double> row(std::size_t i) noexcept { return {data_.data() + i * cols_, cols_}; }
    std::span<const double> row(std::size_t i) const noexcept {
        return {data_.data() + i * cols_, cols_};
    }

    std::span<double> data() noexcept { return data_; }
    std::span<const double> data() const noexcept { return data_; }

    Matrix transposed() const {
        Matrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

inline Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("Matrix product: shape mismatch");
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        auto ci = c.row(i);
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            auto bk = b.row(k);
            for (std::size_t j = 0; j < b.cols(); ++j) ci[j] += aik * bk[j];
        }
    }
    return c;
}

/// aᵀ b without forming the transpose.
inline Matrix transpose_times(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows()) throw std::invalid_argument("transpose_times: shape mismatch");
    Matrix c(a.cols(), b.cols());
    for (std::size_t k = 0; k < a.rows(); ++k) {
        auto ak = a.row(k);
        auto bk = b.row(k);
        for (std::size_t i = 0; i < a.cols(); ++i) {
            const double aki = ak[i];
            if (aki == 0.0) continue;
            auto ci = c.row(i);
            for (std::size_t j = 0; j < b.cols(); ++j) ci[j] += aki * bk[j];
        }
    }
    return c;
}

inline Matrix operator-(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw std::invalid_argument("Matrix difference: shape mismatch");
    Matrix c = a;
    auto cd = c.data();
    auto bd = b.data();
    for (std::size_t i = 0; i < cd.size(); ++i) cd[i] -= bd[i];
    return c;
}

inline double max_abs(const Matrix& a) noexcept {
    double m = 0.0;
    for (double v : a.data()) m = std::max(m, std::abs(v));
    return m;
}

inline double frobenius_norm(const Matrix& a) noexcept {
    double scale = 0.0, ssq = 1.0;
    for (double v : a.data()) {
        if (v == 0.0) continue;
        const double av = std::abs(v);
        if (scale < av) {
            ssq = 1.0 + ssq * (scale / av) * (scale / av);
            scale = av;
        } else {
            ssq += (av / scale) * (av / scale);
        }
    }
    return scale * std::sqrt(ssq);
}

/// Real symmetric matrix. Both triangles are stored and kept identical by every mutator.
class SymmetricMatrix {
public:
    SymmetricMatrix() = default;
    explicit SymmetricMatrix(std::size_t n) : m_(n, n) {}

    SymmetricMatrix(std::initializer_list<std::initializer_list<double>> rows)
        : SymmetricMatrix(from_lower(Matrix(rows))) {}

    /// Builds from the lower triangle of `a`; the upper triangle is ignored.
    static SymmetricMatrix from_lower(const Matrix& a) {
        if (!a.square()) throw std::invalid_argument("SymmetricMatrix: matrix must be square");
        SymmetricMatrix s(a.rows());
        for (std::size_t i = 0; i < a.rows(); ++i)
            for (std::size_t j = 0; j <= i; ++j) s.set(i, j, a(i, j));
        return s;
    }

    /// Symmetric part (a + aᵀ)/2.
    static SymmetricMatrix symmetrized(const Matrix& a) {
        if (!a.square()) throw std::invalid_argument("SymmetricMatrix: matrix must be square");
        SymmetricMatrix s(a.rows());
        for (std::size_t i = 0; i < a.rows(); ++i)
            for (std::size_t j = 0; j <= i; ++j) s.set(i, j, 0.5 * (a(i, j) + a(j, i)));
        return s;
    }

    static SymmetricMatrix identity(std::size_t n) {
        SymmetricMatrix s(n);
        for (std::size_t i = 0; i < n; ++i) s.set(i, i, 1.0);
        return s;
    }

    static SymmetricMatrix diagonal(std::span<const double> d) {
        SymmetricMatrix s(d.size());
        for (std::size_t i = 0; i < d.size(); ++i) s.set(i, i, d[i]);
        return s;
    }

    std::size_t size() const noexcept { return m_.rows(); }
    double operator()(std::size_t i, std::size_t j) const noexcept { return m_(i, j); }
    void set(std::size_t i, std::size_t j, double v) noexcept {
        m_(i, j) = v;
        m_(j, i) = v;
    }
    const Matrix& dense() const noexcept { return m_; }

    bool all_finite() const noexcept {
        return std::all_of(m_.data().begin(), m_.data().end(),
                           [](double v) { return std::isfinite(v); });
    }

    bool operator==(const SymmetricMatrix&) const = default;

private:
    Matrix m_;
};

/// Symmetric tridiagonal matrix with diagonal `a` and off-diagonal `b`.
///
/// A Jacobi matrix proper has every b_i > 0 (`is_jacobi`). Iterates of the
/// algorithms keep b_i >= 0, and b_i == 0 marks an exact split.
struct JacobiMatrix {
    std::vector<double> a;
    std::vector<double> b;

    JacobiMatrix() = default;
    JacobiMatrix(std::vector<double> diag, std::vector<double> offdiag)
        : a(std::move(diag)), b(std::move(offdiag)) {
        if (a.empty()) throw std::invalid_argument("JacobiMatrix: empty diagonal");
        if (b.size() + 1 != a.size())
            throw std::invalid_argument("JacobiMatrix: off-diagonal must have length n-1");
    }

    std::size_t size() const noexcept { return a.size(); }

    bool is_jacobi() const noexcept {
        return std::all_of(a.begin(), a.end(), [](double v) { return std::isfinite(v); }) &&
               std::all_of(b.begin(), b.end(),
                           [](double v) { return std::isfinite(v) && v > 0.0; });
    }

    SymmetricMatrix to_dense() const {
        SymmetricMatrix s(size());
        for (std::size_t i = 0; i < a.size(); ++i) s.set(i, i, a[i]);
        for (std::size_t i = 0; i < b.size(); ++i) s.set(i + 1, i, b[i]);
        return s;
    }

    bool operator==(const JacobiMatrix&) const = default;
};

/// Reads the tridiagonal part of a symmetric matrix, re-signing off-diagonals to be >= 0.
inline JacobiMatrix tridiagonal_part(const SymmetricMatrix& m) {
    const std::size_t n = m.size();
    std::vector<double> a(n), b(n > 0 ? n - 1 : 0);
    for (std::size_t i = 0; i < n; ++i) a[i] = m(i, i);
    for (std::size_t i = 0; i + 1 < n; ++i) b[i] = std::abs(m(i + 1, i));
    return {std::move(a), std::move(b)};
}

}  // namespace deflab::linalg
