#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "deflab/errors.hpp"
#include "deflab/linalg/eigen.hpp"
#include "deflab/linalg/matrix.hpp"

namespace deflab::linalg {

/// The function g = G' that selects a Hamiltonian flow: log gives unshifted QR,
/// identity gives Toda, sign gives the matrix-sign flow.
struct GFunction {
    enum class Kind { Log, Identity, Sign };
    Kind kind = Kind::Identity;

    static constexpr GFunction log() { return {Kind::Log}; }
    static constexpr GFunction identity() { return {Kind::Identity}; }
    static constexpr GFunction sign() { return {Kind::Sign}; }

    double operator()(double x) const {
        switch (kind) {
            case Kind::Log:
                if (!(x > 0.0)) throw DomainError("g = log requires a positive argument");
                return std::log(x);
            case Kind::Identity:
                return x;
            case Kind::Sign:
                if (x == 0.0) throw DomainError("g = sign requires a nonzero argument");
                return x > 0.0 ? 1.0 : -1.0;
        }
        return x;
    }

    bool operator==(const GFunction&) const = default;
};

/// Coordinates (Λ, u) of a Jacobi matrix: strictly decreasing eigenvalues and the
/// first row of the eigenvector matrix, normalized to lie in the positive orthant.
struct SpectralData {
    std::vector<double> lambdas;
    std::vector<double> u;

    std::size_t size() const noexcept { return lambdas.size(); }
};

namespace detail {

inline void check_spectral_data(const SpectralData& s) {
    const std::size_t n = s.lambdas.size();
    if (n == 0 || s.u.size() != n) throw std::invalid_argument("SpectralData: size mismatch");
    double norm2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(s.lambdas[i]) || !std::isfinite(s.u[i]))
            throw std::invalid_argument("SpectralData: non-finite entry");
        if (!(s.u[i] > 0.0))
            throw ReconstructionFailure("weight u[" + std::to_string(i) + "] is not positive");
        if (i > 0 && !(s.lambdas[i - 1] > s.lambdas[i]))
            throw ReconstructionFailure("eigenvalues are not strictly decreasing");
        norm2 += s.u[i] * s.u[i];
    }
    if (std::abs(std::sqrt(norm2) - 1.0) > 1e-10)
        throw std::invalid_argument("SpectralData: u is not a unit vector");
}

// Symmetric tridiagonal matrix plus one bulge entry at (bulge_row, bulge_row + 2).
struct BulgedTridiagonal {
    std::vector<double> d;
    std::vector<double> e;
    std::size_t bulge_row = 0;
    double bulge = 0.0;

    double get(std::size_t i, std::size_t j) const {
        if (i > j) std::swap(i, j);
        if (i == j) return d[i];
        if (j == i + 1) return e[i];
        if (j == i + 2 && i == bulge_row) return bulge;
        return 0.0;
    }

    // Similarity with the rotation acting on coordinates (i, i+1):
    //   x_i' = c x_i + s x_{i+1},  x_{i+1}' = -s x_i + c x_{i+1}.
    void rotate(std::size_t i, double c, double s) {
        const std::size_t m = d.size();
        const std::size_t lo = i > 0 ? i - 1 : 0;
        const std::size_t hi = std::min(m - 1, i + 2);
        const std::size_t w = hi - lo + 1;
        std::array<std::array<double, 4>, 4> l{};
        for (std::size_t r = 0; r < w; ++r)
            for (std::size_t q = 0; q < w; ++q) l[r][q] = get(lo + r, lo + q);
        const std::size_t p0 = i - lo, p1 = p0 + 1;
        for (std::size_t q = 0; q < w; ++q) {
            const double x = l[p0][q], y = l[p1][q];
            l[p0][q] = c * x + s * y;
            l[p1][q] = -s * x + c * y;
        }
        for (std::size_t r = 0; r < w; ++r) {
            const double x = l[r][p0], y = l[r][p1];
            l[r][p0] = c * x + s * y;
            l[r][p1] = -s * x + c * y;
        }
        for (std::size_t r = 0; r < w; ++r) d[lo + r] = l[r][r];
        for (std::size_t r = 0; r + 1 < w; ++r) e[lo + r] = 0.5 * (l[r][r + 1] + l[r + 1][r]);
        // The caller picks (c, s) to annihilate (i-1, i+1); only (i, i+2) can be filled.
        bulge = 0.0;
        if (p0 + 2 < w) {
            bulge_row = i;
            bulge = l[p0][p0 + 2];
        }
    }
};

}  // namespace detail

/// Spectral map J -> (Λ, u) for a Jacobi matrix (all b_i > 0).
inline SpectralData spectral_map(const JacobiMatrix& j) {
    if (!j.is_jacobi()) throw std::invalid_argument("spectral_map: not a Jacobi matrix");
    const std::size_t n = j.size();
    if (n == 1) return {{j.a[0]}, {1.0}};
    const auto dec = sym_eig_baseline(j.to_dense());
    SpectralData s{dec.eigenvalues, std::vector<double>(n)};
    double norm2 = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        s.u[k] = std::abs(dec.eigenvectors(0, k));
        if (!(s.u[k] > 0.0))
            throw DegenerateSpectrum("first eigenvector component vanished numerically");
        norm2 += s.u[k] * s.u[k];
    }
    const double norm = std::sqrt(norm2);
    for (double& x : s.u) x /= norm;
    const double spread = s.lambdas.front() - s.lambdas.back();
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (s.lambdas[k] - s.lambdas[k + 1] < 1e-13 * spread)
            throw DegenerateSpectrum("adjacent eigenvalues are numerically equal");
    }
    return s;
}

/// Reconstructs the Jacobi matrix with spectral data `s`.
///
/// Eigenvalues are absorbed one at a time: each new eigenvalue is bordered onto the
/// current Jacobi matrix, a rotation folds its weight into the first coordinate, and
/// the resulting bulge is chased to the bottom with Givens rotations. Every update is
/// orthogonal, so small trailing off-diagonals are reproduced to working accuracy.
inline JacobiMatrix inverse_spectral_map(const SpectralData& s) {
    detail::check_spectral_data(s);
    const std::size_t n = s.size();
    detail::BulgedTridiagonal w;
    w.d.reserve(n);
    w.e.reserve(n);
    w.d.push_back(s.lambdas[0]);
    double rho = s.u[0];
    for (std::size_t k = 1; k < n; ++k) {
        // Border: the new coordinate goes in front of the existing ones.
        w.d.insert(w.d.begin(), s.lambdas[k]);
        w.e.insert(w.e.begin(), 0.0);
        w.bulge = 0.0;
        const double wk = s.u[k];
        const double r = std::hypot(wk, rho);
        w.rotate(0, wk / r, rho / r);
        rho = r;
        for (std::size_t i = 1; i + 1 < w.d.size(); ++i) {
            if (w.bulge == 0.0 || w.bulge_row != i - 1) break;
            const double x = w.e[i - 1], y = w.bulge;
            const double h = std::hypot(x, y);
            w.rotate(i, x / h, y / h);
        }
    }
    // Diagonal ±1 similarity fixing the off-diagonal signs; coordinate 0 is never flipped.
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (w.e[i] < 0.0) {
            w.e[i] = -w.e[i];
            if (i + 1 < w.e.size()) w.e[i + 1] = -w.e[i + 1];
        }
        if (!(w.e[i] > 0.0))
            throw ReconstructionFailure("off-diagonal entry " + std::to_string(i) +
                                        " vanished during reconstruction");
    }
    return {std::move(w.d), std::move(w.e)};
}

/// Explicit solution of the flow generated by g, started at S^{-1}(s), at time t:
/// u(t) = e^{t g(Λ)} u / ||e^{t g(Λ)} u||, L(t) = S^{-1}(Λ, u(t)).
inline JacobiMatrix flow_solution(const SpectralData& s, GFunction g, double t) {
    detail::check_spectral_data(s);
    if (!std::isfinite(t)) throw std::invalid_argument("flow_solution: t must be finite");
    if (t == 0.0) return inverse_spectral_map(s);
    const std::size_t n = s.size();
    std::vector<double> w(n);
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        w[i] = t * g(s.lambdas[i]);
        top = std::max(top, w[i]);
    }
    SpectralData moved{s.lambdas, std::vector<double>(n)};
    double norm2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        moved.u[i] = s.u[i] * std::exp(w[i] - top);
        norm2 += moved.u[i] * moved.u[i];
    }
    const double norm = std::sqrt(norm2);
    for (double& x : moved.u) {
        x /= norm;
        if (!(x > 0.0)) throw ReconstructionFailure("flow weight underflowed to zero");
    }
    return inverse_spectral_map(moved);
}

}  // namespace deflab::linalg
