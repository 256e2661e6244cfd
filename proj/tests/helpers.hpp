#pragma once

#include <gtest/gtest.h>

#include <vector>

#include "graphdsp/graphdsp.hpp"

namespace gt {

using namespace graphdsp;

inline CMatrix random_matrix(Rng& rng, Eigen::Index n, bool complex_entries = true) {
    CMatrix m(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) m(i, j) = cplx(rng.normal(), complex_entries ? rng.normal() : 0.0);
    return m;
}

inline CVector random_vector(Rng& rng, Eigen::Index n, bool complex_entries = true) {
    CVector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = cplx(rng.normal(), complex_entries ? rng.normal() : 0.0);
    return v;
}

inline Polynomial random_poly(Rng& rng, std::size_t degree) {
    std::vector<cplx> c;
    for (std::size_t i = 0; i <= degree; ++i) c.emplace_back(rng.normal(), rng.normal());
    return Polynomial(std::move(c), 0.0);
}

/// Integer matrix with determinant +-1 (product of unit triangular factors), so
/// its inverse is integral too.
inline CMatrix unimodular(Rng& rng, Eigen::Index n) {
    CMatrix l = CMatrix::Identity(n, n), u = CMatrix::Identity(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < i; ++j) {
            l(i, j) = static_cast<double>(static_cast<int>(rng.below(3)) - 1);
            u(j, i) = static_cast<double>(static_cast<int>(rng.below(3)) - 1);
        }
    return l * u;
}

/// Jordan matrix with blocks (eigenvalue, size) in the given order.
inline CMatrix jordan_matrix(const std::vector<std::pair<cplx, int>>& blocks) {
    int n = 0;
    for (const auto& b : blocks) n += b.second;
    CMatrix j = CMatrix::Zero(n, n);
    int off = 0;
    for (const auto& [lambda, size] : blocks) {
        for (int r = 0; r < size; ++r) {
            j(off + r, off + r) = lambda;
            if (r + 1 < size) j(off + r, off + r + 1) = 1.0;
        }
        off += size;
    }
    return j;
}

/// Dense h(A) by explicit powers (independent of Horner evaluation).
inline CMatrix poly_of_matrix(const Polynomial& h, const CMatrix& a) {
    CMatrix out = CMatrix::Zero(a.rows(), a.cols());
    CMatrix p = CMatrix::Identity(a.rows(), a.cols());
    for (std::size_t i = 0; i < h.size(); ++i) {
        out += h[i] * p;
        p = p * a;
    }
    return out;
}

inline double rel_diff(const CMatrix& a, const CMatrix& b) {
    return (a - b).norm() / std::max(1.0, b.norm());
}

inline JordanOptions exact_opts() {
    JordanOptions o;
    o.backend = Backend::exact;
    return o;
}

} // namespace gt
