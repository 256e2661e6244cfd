#pragma once

// Derivative-constrained (Hermite) interpolation: the unique polynomial of degree
// below the total constraint count matching prescribed values and derivatives.

#include <cmath>
#include <string>
#include <vector>

#include "graphdsp/config.hpp"
#include "graphdsp/exact.hpp"
#include "graphdsp/linalg.hpp"
#include "graphdsp/polynomial.hpp"

namespace graphdsp {

/// p(point) = values[0], p'(point) = values[1], ..., p^{(r-1)}(point) = values[r-1].
template <class T>
struct BasicHermiteConstraint {
    T point;
    std::vector<T> values;
};

using HermiteConstraint = BasicHermiteConstraint<cplx>;
using ExactHermiteConstraint = BasicHermiteConstraint<GaussRational>;

namespace detail {

inline std::size_t total_constraints(const auto& constraints) {
    std::size_t t = 0;
    for (const auto& c : constraints) t += c.values.size();
    return t;
}

// d^k/dx^k x^j at x, i.e. j!/(j-k)! x^{j-k}
template <class T>
T monomial_derivative(const T& x, std::size_t j, std::size_t k) {
    if (j < k) return T(0);
    T f(1);
    for (std::size_t i = j - k + 1; i <= j; ++i) f = f * T(static_cast<int>(i));
    T p(1);
    for (std::size_t i = 0; i < j - k; ++i) p = p * x;
    return f * p;
}

} // namespace detail

/// Numeric interpolation through the confluent Vandermonde system.
/// Throws InterpolationError when the system is too ill-conditioned or the
/// residual exceeds `tol.solve`.
inline Polynomial hermite_interpolate(const std::vector<HermiteConstraint>& constraints, const Tolerances& tol = {}) {
    const std::size_t total = detail::total_constraints(constraints);
    if (total == 0) throw ValidationError("hermite_interpolate: no constraints");
    for (std::size_t i = 0; i < constraints.size(); ++i)
        for (std::size_t j = i + 1; j < constraints.size(); ++j)
            if (std::abs(constraints[i].point - constraints[j].point) <= tol.lambda_sep)
                throw ValidationError("hermite_interpolate: interpolation points " + linalg::format(constraints[i].point) +
                                      " and " + linalg::format(constraints[j].point) + " are not distinct");

    const auto n = static_cast<Eigen::Index>(total);
    CMatrix vander(n, n);
    CVector rhs(n);
    Eigen::Index row = 0;
    for (const auto& c : constraints)
        for (std::size_t k = 0; k < c.values.size(); ++k, ++row) {
            for (Eigen::Index j = 0; j < n; ++j)
                vander(row, j) = detail::monomial_derivative(c.point, static_cast<std::size_t>(j), k);
            rhs(row) = c.values[k];
        }

    // Column equilibration before estimating conditioning; monomial columns of
    // different degree otherwise dominate the estimate.
    RVector scale(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const double s = vander.col(j).norm();
        scale(j) = s > 0.0 ? 1.0 / s : 1.0;
    }
    const CMatrix scaled = vander * scale.asDiagonal();
    Eigen::BDCSVD<CMatrix> svd(scaled, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double cond = sv(n - 1) > 0.0 ? sv(0) / sv(n - 1) : INFINITY;
    if (!(cond <= tol.interp_cond))
        throw InterpolationError("hermite_interpolate: confluent Vandermonde system is ill-conditioned (cond ~ " +
                                 std::to_string(cond) + "); use the exact backend");
    CVector coeffs = svd.solve(rhs);
    coeffs = scale.asDiagonal() * coeffs;

    Polynomial p(std::vector<cplx>(coeffs.data(), coeffs.data() + n), 0.0);
    for (const auto& c : constraints)
        for (std::size_t k = 0; k < c.values.size(); ++k) {
            const double err = std::abs(p(c.point, k) - c.values[k]);
            if (err > tol.solve * (1.0 + std::abs(c.values[k])))
                throw InterpolationError("hermite_interpolate: residual " + std::to_string(err) +
                                         " exceeds tolerance at " + linalg::format(c.point) + "; use the exact backend");
        }
    return p.trim(tol.trim);
}

/// Exact interpolation over Gaussian rationals.
inline ExactPolynomial hermite_interpolate(const std::vector<ExactHermiteConstraint>& constraints) {
    const std::size_t total = detail::total_constraints(constraints);
    if (total == 0) throw ValidationError("hermite_interpolate: no constraints");
    for (std::size_t i = 0; i < constraints.size(); ++i)
        for (std::size_t j = i + 1; j < constraints.size(); ++j)
            if (constraints[i].point == constraints[j].point)
                throw ValidationError("hermite_interpolate: repeated interpolation point " + constraints[i].point.str());

    exact::Matrix vander(total, total), rhs(total, 1);
    std::size_t row = 0;
    for (const auto& c : constraints)
        for (std::size_t k = 0; k < c.values.size(); ++k, ++row) {
            for (std::size_t j = 0; j < total; ++j) vander(row, j) = detail::monomial_derivative(c.point, j, k);
            rhs(row, 0) = c.values[k];
        }
    const exact::Matrix sol = exact::solve(vander, rhs);
    return ExactPolynomial(sol.col(0));
}

} // namespace graphdsp
