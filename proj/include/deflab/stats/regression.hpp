#pragma once

#include <array>
#include <cmath>
#include <span>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "deflab/errors.hpp"
#include "deflab/linalg/matrix.hpp"
#include "deflab/linalg/qr.hpp"

namespace deflab::stats {

/// OLS fit of y ≈ c₀ + c₁ x_dim + c₂ x_eps (x_dim is n or log n, x_eps is log ε).
struct RegressionFit {
    std::array<double, 3> coefficients{};
    std::array<double, 3> std_errors{};
    std::vector<double> residuals;
    double residual_std_error = 0.0;
    std::size_t dof = 0;
    double t_dim = 0.0;
    double p_value_dim = 1.0;  // two-sided t test of c₁ = 0
};

namespace detail {

inline std::array<std::array<double, 3>, 3> invert3(const std::array<std::array<double, 3>, 3>& a) {
    const double det = a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
                       a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
                       a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
    if (!(std::abs(det) > 0.0)) throw SingularDesign("normal matrix is singular");
    std::array<std::array<double, 3>, 3> inv{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            const int r0 = (j + 1) % 3, r1 = (j + 2) % 3, c0 = (i + 1) % 3, c1 = (i + 2) % 3;
            inv[i][j] = (a[r0][c0] * a[r1][c1] - a[r0][c1] * a[r1][c0]) / det;
        }
    return inv;
}

}  // namespace detail

inline RegressionFit linear_regression(std::span<const double> x_dim, std::span<const double> x_eps,
                                       std::span<const double> y) {
    const std::size_t n = y.size();
    if (x_dim.size() != n || x_eps.size() != n)
        throw std::invalid_argument("linear_regression: length mismatch");
    if (n < 4) throw SingularDesign("linear_regression: need at least 4 design points");
    linalg::Matrix x(n, 3);
    for (std::size_t i = 0; i < n; ++i) {
        x(i, 0) = 1.0;
        x(i, 1) = x_dim[i];
        x(i, 2) = x_eps[i];
    }
    RegressionFit fit;
    std::vector<double> c;
    try {
        c = linalg::least_squares(x, y);
    } catch (const RankDeficient& e) {
        throw SingularDesign(e.what());
    }
    for (int k = 0; k < 3; ++k) fit.coefficients[k] = c[k];
    fit.residuals.resize(n);
    double rss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        fit.residuals[i] = y[i] - (c[0] + c[1] * x_dim[i] + c[2] * x_eps[i]);
        rss += fit.residuals[i] * fit.residuals[i];
    }
    fit.dof = n - 3;
    const double sigma2 = rss / static_cast<double>(fit.dof);
    fit.residual_std_error = std::sqrt(sigma2);

    std::array<std::array<double, 3>, 3> xtx{};
    for (std::size_t i = 0; i < n; ++i)
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) xtx[a][b] += x(i, a) * x(i, b);
    const auto inv = detail::invert3(xtx);
    for (int k = 0; k < 3; ++k) fit.std_errors[k] = std::sqrt(std::max(0.0, sigma2 * inv[k][k]));

    if (fit.std_errors[1] > 0.0) {
        fit.t_dim = fit.coefficients[1] / fit.std_errors[1];
        const boost::math::students_t dist(static_cast<double>(fit.dof));
        fit.p_value_dim = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(fit.t_dim)));
    } else {
        fit.t_dim = fit.coefficients[1] == 0.0 ? 0.0 : std::copysign(INFINITY, fit.coefficients[1]);
        fit.p_value_dim = fit.coefficients[1] == 0.0 ? 1.0 : 0.0;
    }
    return fit;
}

}  // namespace deflab::stats
