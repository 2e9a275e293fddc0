#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "deflab/errors.hpp"
#include "deflab/linalg/eigen.hpp"
#include "deflab/linalg/matrix.hpp"
#include "deflab/linalg/qr.hpp"

namespace deflab::algorithms {

using linalg::Matrix;
using linalg::SymmetricMatrix;

namespace detail {

struct Inverse {
    Matrix inv;
    double log_abs_det = 0.0;
};

// Gauss-Jordan with partial pivoting.
inline Inverse invert(const Matrix& m) {
    const std::size_t n = m.rows();
    Matrix a = m;
    Matrix inv = Matrix::identity(n);
    double log_det = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(a(i, k)) > std::abs(a(piv, k))) piv = i;
        const double p = a(piv, k);
        if (!(std::abs(p) > 0.0) || !std::isfinite(p))
            throw NearSingular("matrix is singular to working precision");
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) {
                std::swap(a(k, j), a(piv, j));
                std::swap(inv(k, j), inv(piv, j));
            }
        }
        log_det += std::log(std::abs(p));
        const double rp = 1.0 / p;
        for (std::size_t j = 0; j < n; ++j) {
            a(k, j) *= rp;
            inv(k, j) *= rp;
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (i == k) continue;
            const double f = a(i, k);
            if (f == 0.0) continue;
            for (std::size_t j = 0; j < n; ++j) {
                a(i, j) -= f * a(k, j);
                inv(i, j) -= f * inv(k, j);
            }
        }
    }
    return {std::move(inv), log_det};
}

}  // namespace detail

inline constexpr int kMaxNewtonSteps = 100;

/// Scaled Newton iteration X <- (μX + (μX)^{-1}) / 2 for the matrix sign function, with
/// determinantal scaling μ = |det X|^{-1/n} until the iterates settle.
class SignNewton {
public:
    explicit SignNewton(const SymmetricMatrix& m) : x_(m) {
        if (!m.all_finite()) throw std::invalid_argument("SignNewton: non-finite entries");
    }

    /// Performs one step; returns the relative Frobenius change.
    double step() {
        const std::size_t n = x_.size();
        const auto inv = detail::invert(x_.dense());
        const double mu = scaling_ ? std::exp(-inv.log_abs_det / static_cast<double>(n)) : 1.0;
        SymmetricMatrix next(n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j <= i; ++j) {
                const double xinv = 0.5 * (inv.inv(i, j) + inv.inv(j, i));
                next.set(i, j, 0.5 * (mu * x_(i, j) + xinv / mu));
            }
        const double change =
            linalg::frobenius_norm(next.dense() - x_.dense()) / linalg::frobenius_norm(next.dense());
        x_ = std::move(next);
        ++steps_;
        if (change < 1e-2) scaling_ = false;
        return change;
    }

    const SymmetricMatrix& current() const noexcept { return x_; }
    int steps() const noexcept { return steps_; }

private:
    SymmetricMatrix x_;
    bool scaling_ = true;
    int steps_ = 0;
};

struct SignResult {
    SymmetricMatrix sign;
    int newton_iterations = 0;
};

inline constexpr double kNewtonTolerance = 1e-13;

/// Runs a SignNewton to convergence (relative change below 1e-13, or stagnation once
/// the change is already at roundoff level).
inline SignResult run_sign_newton(const SymmetricMatrix& m, int max_steps = kMaxNewtonSteps) {
    SignNewton it(m);
    double prev = std::numeric_limits<double>::infinity();
    for (int k = 0; k < max_steps; ++k) {
        const double change = it.step();
        if (change < kNewtonTolerance || (change < 1e-10 && change >= prev))
            return {it.current(), it.steps()};
        prev = change;
    }
    throw NoConvergence("sign_matrix: Newton iteration did not converge");
}

/// sign(M) = P₊ - P₋ for symmetric M with no eigenvalue within 1e-10·‖M‖₂ of zero.
inline SignResult sign_matrix_with_count(const SymmetricMatrix& m) {
    const auto dec = linalg::sym_eig_baseline(m);
    double norm = 0.0, smallest = std::numeric_limits<double>::infinity();
    for (double l : dec.eigenvalues) {
        norm = std::max(norm, std::abs(l));
        smallest = std::min(smallest, std::abs(l));
    }
    if (!(smallest > 1e-10 * norm)) throw NearSingular("sign_matrix: eigenvalue too close to 0");
    return run_sign_newton(m);
}

inline SymmetricMatrix sign_matrix(const SymmetricMatrix& m) { return sign_matrix_with_count(m).sign; }

struct SignDeflationResult {
    SymmetricMatrix block_diagonal;
    std::size_t split_index = 0;
    int newton_iterations = 0;
};

/// Orthogonal basis adapted to the approximate projector (I + X)/2, from a column
/// pivoted QR: the first k columns span its range, k = round(trace).
struct ProjectorBasis {
    Matrix u;
    std::size_t rank = 0;
};

inline ProjectorBasis projector_basis(const SymmetricMatrix& x) {
    const std::size_t n = x.size();
    Matrix p(n, n);
    double trace = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            p(i, j) = 0.5 * ((i == j ? 1.0 : 0.0) + x(i, j));
            if (i == j) trace += p(i, j);
        }
    auto f = linalg::qr_factor_pivoted(p);
    const double k = std::round(trace);
    return {std::move(f.q), static_cast<std::size_t>(std::clamp(k, 0.0, static_cast<double>(n)))};
}

/// Splits M along the sign of its spectrum: L̃ = Uᵀ M U with U from a rank-revealing QR
/// of P₊ = (I + sign(M)) / 2. The leading k×k block carries the positive eigenvalues.
inline SignDeflationResult sign_deflate(const SymmetricMatrix& m) {
    const auto s = sign_matrix_with_count(m);
    const auto basis = projector_basis(s.sign);
    auto lt = SymmetricMatrix::symmetrized(
        linalg::transpose_times(basis.u, m.dense() * basis.u));
    return {std::move(lt), basis.rank, s.newton_iterations};
}

}  // namespace deflab::algorithms
