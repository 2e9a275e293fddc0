#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "deflab/errors.hpp"
#include "deflab/linalg/matrix.hpp"

namespace deflab::linalg {

/// M = U diag(eigenvalues) Uᵀ with eigenvalues in descending order and U's columns
/// the corresponding orthonormal eigenvectors.
struct SpectralDecomposition {
    std::vector<double> eigenvalues;
    Matrix eigenvectors;
};

inline constexpr int kDefaultJacobiSweeps = 100;

/// Reference symmetric eigensolver (cyclic Jacobi rotations).
///
/// Deliberately not QR based, so measurements of the QR-type iterations never rely
/// on the algorithm under study.
inline SpectralDecomposition sym_eig_baseline(const SymmetricMatrix& m,
                                              int max_sweeps = kDefaultJacobiSweeps) {
    const std::size_t n = m.size();
    if (n == 0) throw std::invalid_argument("sym_eig_baseline: empty matrix");
    if (!m.all_finite()) throw std::invalid_argument("sym_eig_baseline: non-finite entries");
    Matrix a = m.dense();
    Matrix v = Matrix::identity(n);

    auto off_norm2 = [&] {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < i; ++j) s += a(i, j) * a(i, j);
        return s;
    };

    bool converged = n == 1;
    for (int sweep = 0; sweep < max_sweeps && !converged; ++sweep) {
        if (off_norm2() == 0.0) {
            converged = true;
            break;
        }
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double app = a(p, p), aqq = a(q, q);
                const double g = 100.0 * std::abs(apq);
                // Negligible against both diagonal entries: annihilate without rotating.
                if (sweep > 3 && std::abs(app) + g == std::abs(app) &&
                    std::abs(aqq) + g == std::abs(aqq)) {
                    a(p, q) = 0.0;
                    a(q, p) = 0.0;
                    continue;
                }
                const double h = aqq - app;
                double t;
                if (std::abs(h) + g == std::abs(h)) {
                    t = apq / h;
                } else {
                    const double theta = 0.5 * h / apq;
                    t = 1.0 / (std::abs(theta) + std::sqrt(1.0 + theta * theta));
                    if (theta < 0.0) t = -t;
                }
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                const double tau = s / (1.0 + c);
                a(p, p) = app - t * apq;
                a(q, q) = aqq + t * apq;
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                for (std::size_t r = 0; r < n; ++r) {
                    if (r == p || r == q) continue;
                    const double arp = a(r, p), arq = a(r, q);
                    const double nrp = arp - s * (arq + tau * arp);
                    const double nrq = arq + s * (arp - tau * arq);
                    a(r, p) = nrp;
                    a(p, r) = nrp;
                    a(r, q) = nrq;
                    a(q, r) = nrq;
                }
                for (std::size_t r = 0; r < n; ++r) {
                    auto vr = v.row(r);
                    const double vrp = vr[p], vrq = vr[q];
                    vr[p] = vrp - s * (vrq + tau * vrp);
                    vr[q] = vrq + s * (vrp - tau * vrq);
                }
            }
        }
    }
    if (!converged && off_norm2() != 0.0) {
        // One last look: accept if the residual coupling is at roundoff level.
        double fro2 = 0.0;
        for (double x : a.data()) fro2 += x * x;
        if (off_norm2() > 1e-30 * fro2)
            throw NoConvergence("sym_eig_baseline: sweep budget exhausted");
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });
    SpectralDecomposition out{std::vector<double>(n), Matrix(n, n)};
    for (std::size_t k = 0; k < n; ++k) {
        out.eigenvalues[k] = a(order[k], order[k]);
        for (std::size_t r = 0; r < n; ++r) out.eigenvectors(r, k) = v(r, order[k]);
    }
    return out;
}

/// U f(Λ) Uᵀ for a precomputed decomposition.
template <class F>
SymmetricMatrix spectral_function(const SpectralDecomposition& d, F&& f) {
    const std::size_t n = d.eigenvalues.size();
    std::vector<double> fl(n);
    for (std::size_t k = 0; k < n; ++k) fl[k] = f(d.eigenvalues[k]);
    const Matrix& u = d.eigenvectors;
    SymmetricMatrix out(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto ui = u.row(i);
        for (std::size_t j = 0; j <= i; ++j) {
            auto uj = u.row(j);
            double s = 0.0;
            for (std::size_t k = 0; k < n; ++k) s += ui[k] * fl[k] * uj[k];
            out.set(i, j, s);
        }
    }
    return out;
}

/// Largest argument for which std::exp stays finite.
inline constexpr double kMaxExpArgument = 709.0;

/// exp(M - shift I) through the eigendecomposition `d` of M.
inline SymmetricMatrix sym_exp_shifted(const SpectralDecomposition& d, double shift) {
    const double top = d.eigenvalues.front() - shift;
    if (!(top <= kMaxExpArgument)) throw Overflow("sym_exp: spectrum exceeds exp range");
    return spectral_function(d, [shift](double x) { return std::exp(x - shift); });
}

/// Matrix exponential of a symmetric matrix, U e^Λ Uᵀ.
inline SymmetricMatrix sym_exp(const SymmetricMatrix& m) {
    return sym_exp_shifted(sym_eig_baseline(m), 0.0);
}

/// Upper Gershgorin bound on the spectrum: max_i (m_ii + sum_{j != i} |m_ij|).
inline double gershgorin_upper(const SymmetricMatrix& m) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m.size(); ++i) {
        double r = m(i, i);
        for (std::size_t j = 0; j < m.size(); ++j)
            if (j != i) r += std::abs(m(i, j));
        best = std::max(best, r);
    }
    return best;
}

}  // namespace deflab::linalg
