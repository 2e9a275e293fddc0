#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "deflab/errors.hpp"
#include "deflab/linalg/eigen.hpp"
#include "deflab/linalg/matrix.hpp"
#include "deflab/linalg/qr.hpp"

namespace deflab::algorithms {

using linalg::JacobiMatrix;
using linalg::Matrix;
using linalg::SymmetricMatrix;

namespace detail {

// R Q for upper-triangular R, symmetrized (the product is symmetric in exact arithmetic).
inline SymmetricMatrix upper_times(const Matrix& r, const Matrix& q) {
    const std::size_t n = r.rows();
    Matrix p(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        auto pi = p.row(i);
        auto ri = r.row(i);
        for (std::size_t k = i; k < n; ++k) {
            const double rik = ri[k];
            if (rik == 0.0) continue;
            auto qk = q.row(k);
            for (std::size_t j = 0; j < n; ++j) pi[j] += rik * qk[j];
        }
    }
    return SymmetricMatrix::symmetrized(p);
}

inline SymmetricMatrix shifted(const SymmetricMatrix& m, double mu) {
    SymmetricMatrix s = m;
    for (std::size_t i = 0; i < m.size(); ++i) s.set(i, i, m(i, i) - mu);
    return s;
}

inline double wilkinson_from_block(double x, double y, double z) {
    if (y == 0.0) return z;
    const double d = 0.5 * (x - z);
    const double sgn = d >= 0.0 ? 1.0 : -1.0;
    return z - sgn * y * y / (std::abs(d) + std::hypot(d, y));
}

}  // namespace detail

/// One unshifted QR step M = QR -> RQ = QᵀMQ on a dense symmetric matrix.
inline SymmetricMatrix qr_step(const SymmetricMatrix& m) {
    const auto f = linalg::qr_factor(m.dense());
    return detail::upper_times(f.r, f.q);
}

/// One QR step on a symmetric tridiagonal matrix with Givens rotations, O(n).
///
/// Computes RQ + μI for (M - μI) = QR. Off-diagonals of the result are returned with
/// nonnegative sign, which is the positive-diagonal convention for R.
inline JacobiMatrix qr_step(const JacobiMatrix& m, double mu = 0.0) {
    const std::size_t n = m.size();
    if (n == 1) {
        if (!(std::abs(m.a[0] - mu) >= linalg::kRankThreshold))
            throw RankDeficient("qr_step: singular 1x1 matrix");
        return m;
    }
    std::vector<double> c(n - 1), s(n - 1), rd(n), r1(n - 1);
    double p = m.a[0] - mu;
    double q = m.b[0];
    for (std::size_t k = 0; k + 1 < n; ++k) {
        const double y = m.b[k];
        const double r = std::hypot(p, y);
        if (!(r >= linalg::kRankThreshold))
            throw RankDeficient("qr_step: |R(" + std::to_string(k) + "," + std::to_string(k) +
                                ")| below threshold");
        c[k] = p / r;
        s[k] = y / r;
        rd[k] = r;
        const double next_a = m.a[k + 1] - mu;
        r1[k] = c[k] * q + s[k] * next_a;
        p = -s[k] * q + c[k] * next_a;
        q = k + 2 < n ? c[k] * m.b[k + 1] : 0.0;
    }
    rd[n - 1] = p;
    if (!(std::abs(p) >= linalg::kRankThreshold))
        throw RankDeficient("qr_step: |R(" + std::to_string(n - 1) + "," + std::to_string(n - 1) +
                            ")| below threshold");
    JacobiMatrix out;
    out.a.resize(n);
    out.b.resize(n - 1);
    double c_prev = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double ck = k + 1 < n ? c[k] : 1.0;
        const double sk = k + 1 < n ? s[k] : 0.0;
        out.a[k] = ck * c_prev * rd[k] + (k + 1 < n ? sk * r1[k] : 0.0) + mu;
        if (k + 1 < n) out.b[k] = std::abs(sk * rd[k + 1]);
        c_prev = ck;
    }
    return out;
}

/// Wilkinson shift: the eigenvalue of the trailing 2x2 block closer to its last
/// diagonal entry (ties resolved towards the smaller eigenvalue).
inline double wilkinson_shift(const SymmetricMatrix& m) {
    const std::size_t n = m.size();
    if (n < 2) throw std::invalid_argument("wilkinson_shift: n must be at least 2");
    return detail::wilkinson_from_block(m(n - 2, n - 2), m(n - 1, n - 2), m(n - 1, n - 1));
}

inline double wilkinson_shift(const JacobiMatrix& m) {
    const std::size_t n = m.size();
    if (n < 2) throw std::invalid_argument("wilkinson_shift: n must be at least 2");
    return detail::wilkinson_from_block(m.a[n - 2], m.b[n - 2], m.a[n - 1]);
}

inline constexpr double kShiftPerturbation = 1e-14;

/// One QR step with the Wilkinson shift. If M - μI is numerically singular the shift
/// is moved by 1e-14·‖M‖_F and the step retried.
inline SymmetricMatrix qr_wilkinson_step(const SymmetricMatrix& m) {
    double mu = wilkinson_shift(m);
    const double bump = kShiftPerturbation * std::max(linalg::frobenius_norm(m.dense()), 1e-300);
    for (int attempt = 0;; ++attempt) {
        try {
            const auto f = linalg::qr_factor(detail::shifted(m, mu).dense());
            return detail::shifted(detail::upper_times(f.r, f.q), -mu);
        } catch (const RankDeficient&) {
            if (attempt >= 3) throw;
            mu += bump;
        }
    }
}

inline JacobiMatrix qr_wilkinson_step(const JacobiMatrix& m) {
    double mu = wilkinson_shift(m);
    double fro2 = 0.0;
    for (double x : m.a) fro2 += x * x;
    for (double x : m.b) fro2 += 2.0 * x * x;
    const double bump = kShiftPerturbation * std::max(std::sqrt(fro2), 1e-300);
    for (int attempt = 0;; ++attempt) {
        try {
            return qr_step(m, mu);
        } catch (const RankDeficient&) {
            if (attempt >= 3) throw;
            mu += bump;
        }
    }
}

/// One Toda step T -> QᵀTQ, with Q the orthogonal factor of exp(T - cI) and c the
/// upper Gershgorin bound (the scalar factor e^{-c} leaves Q unchanged).
inline SymmetricMatrix toda_step(const SymmetricMatrix& t) {
    const auto dec = linalg::sym_eig_baseline(t);
    const double c = linalg::gershgorin_upper(t);
    const auto e = linalg::sym_exp_shifted(dec, c);
    const auto f = linalg::qr_factor(e.dense());
    return SymmetricMatrix::symmetrized(linalg::transpose_times(f.q, t.dense() * f.q));
}

/// Toda step on a tridiagonal matrix; the band structure is preserved by the flow, so
/// only the tridiagonal part of the dense result is returned.
inline JacobiMatrix toda_step(const JacobiMatrix& t) {
    return linalg::tridiagonal_part(toda_step(t.to_dense()));
}

/// Repeated Toda steps with the eigenbasis carried along.
///
/// With L = Vᵀ Λ V (rows of V are eigenvectors), exp(L) = Vᵀ (e^Λ V), so the QR factor
/// of exp(L) is Vᵀ Q̃ where Q̃ R̃ = e^{Λ-λ₁} V. The next iterate is Q̃ᵀ Λ Q̃, so Q̃ replaces
/// V and no eigensolve is needed after the first. Rows of e^{Λ-λ₁} V are ordered by
/// decreasing scale, which keeps Householder QR accurate even when the exponentials
/// span many orders of magnitude.
class TodaIterator {
public:
    explicit TodaIterator(const SymmetricMatrix& t0) {
        const auto dec = linalg::sym_eig_baseline(t0);
        lambdas_ = dec.eigenvalues;
        v_ = dec.eigenvectors.transposed();
        const double spread = lambdas_.front() - lambdas_.back();
        if (spread > linalg::kMaxExpArgument)
            throw Overflow("TodaIterator: spectrum too wide for exp(Λ - λ₁)");
        scale_.resize(lambdas_.size());
        for (std::size_t i = 0; i < lambdas_.size(); ++i)
            scale_[i] = std::exp(lambdas_[i] - lambdas_.front());
    }

    void step() {
        const std::size_t n = lambdas_.size();
        Matrix w = v_;
        for (std::size_t i = 0; i < n; ++i)
            for (double& x : w.row(i)) x *= scale_[i];
        v_ = linalg::qr_factor(w).q;
    }

    /// Current iterate Vᵀ Λ V.
    SymmetricMatrix current() const {
        const std::size_t n = lambdas_.size();
        Matrix lv = v_;
        for (std::size_t i = 0; i < n; ++i)
            for (double& x : lv.row(i)) x *= lambdas_[i];
        return SymmetricMatrix::symmetrized(linalg::transpose_times(v_, lv));
    }

    const std::vector<double>& eigenvalues() const noexcept { return lambdas_; }

private:
    std::vector<double> lambdas_;
    std::vector<double> scale_;
    Matrix v_;
};

}  // namespace deflab::algorithms
