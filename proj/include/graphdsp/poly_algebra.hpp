#pragma once

// Characteristic and minimal polynomials, and polynomials evaluated on Jordan blocks.

#include <Eigen/Eigenvalues>

#include <utility>
#include <vector>

#include "graphdsp/config.hpp"
#include "graphdsp/exact.hpp"
#include "graphdsp/hermite.hpp"
#include "graphdsp/linalg.hpp"
#include "graphdsp/polynomial.hpp"
#include "graphdsp/spectral_basis.hpp"

namespace graphdsp {

/// det(xI - A) by Faddeev-LeVerrier over Gaussian rationals.
inline ExactPolynomial char_poly(const exact::Matrix& a) {
    if (a.rows() != a.cols()) throw ValidationError("char_poly: matrix must be square");
    const std::size_t n = a.rows();
    std::vector<GaussRational> c(n + 1);
    c[n] = 1;
    exact::Matrix m(n, n);  // M_0 = 0
    for (std::size_t k = 1; k <= n; ++k) {
        m = a * m;
        for (std::size_t i = 0; i < n; ++i) m(i, i) += c[n - k + 1];
        c[n - k] = -((a * m).trace() / GaussRational(static_cast<int>(k)));
    }
    return ExactPolynomial(std::move(c));
}

/// det(xI - A) from the eigenvalues (with algebraic multiplicity), or exactly
/// via Faddeev-LeVerrier when `backend == Backend::exact`.
inline Polynomial char_poly(const CMatrix& a, Backend backend = Backend::numeric) {
    if (a.rows() != a.cols()) throw ValidationError("char_poly: matrix must be square");
    if (!linalg::all_finite(a)) throw ValidationError("char_poly: non-finite entries");
    if (backend == Backend::exact) return to_complex(char_poly(exact::Matrix::from_complex(a)));
    if (a.rows() == 0) return Polynomial::constant(1.0);
    Eigen::ComplexEigenSolver<CMatrix> es(a, false);
    std::vector<std::pair<cplx, std::size_t>> roots;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) roots.emplace_back(es.eigenvalues()(i), 1);
    return Polynomial::from_roots(roots);
}

/// prod_m (x - lambda_m)^{R_m}, R_m the longest chain of lambda_m.
inline Polynomial min_poly(const SpectralBasis& basis) {
    std::vector<std::pair<cplx, std::size_t>> roots;
    for (std::size_t m = 0; m < basis.eigenvalues().size(); ++m) roots.emplace_back(basis.eigenvalues()[m], basis.index(m));
    return Polynomial::from_roots(roots);
}

/// prod_m (x - lambda_m)^{A_m}, read off the Jordan structure.
inline Polynomial char_poly(const SpectralBasis& basis) {
    std::vector<std::pair<cplx, std::size_t>> roots;
    for (std::size_t m = 0; m < basis.eigenvalues().size(); ++m)
        roots.emplace_back(basis.eigenvalues()[m], basis.algebraic_multiplicity(m));
    return Polynomial::from_roots(roots);
}

/// Minimal polynomial over Gaussian rationals; requires an exact-backend basis.
inline ExactPolynomial min_poly_exact(const SpectralBasis& basis) {
    if (!basis.exact_data()) throw ValidationError("min_poly_exact: basis was not computed with the exact backend");
    std::vector<std::pair<GaussRational, std::size_t>> roots;
    for (std::size_t m = 0; m < basis.eigenvalues().size(); ++m)
        roots.emplace_back(basis.exact_data()->eigenvalues[m], basis.index(m));
    return ExactPolynomial::from_roots(roots);
}

/// h(J_r(lambda)): entry (i, j) = h^{(j-i)}(lambda) / (j-i)! for j >= i.
inline CMatrix eval_on_jordan_block(const Polynomial& h, cplx lambda, std::size_t r) {
    if (r == 0) throw ValidationError("eval_on_jordan_block: block size must be positive");
    const auto n = static_cast<Eigen::Index>(r);
    CMatrix out = CMatrix::Zero(n, n);
    double factorial = 1.0;
    for (std::size_t k = 0; k < r; ++k) {
        if (k > 0) factorial *= static_cast<double>(k);
        const cplx d = h(lambda, k) / factorial;
        for (std::size_t i = 0; i + k < r; ++i) out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i + k)) = d;
    }
    return out;
}

} // namespace graphdsp
