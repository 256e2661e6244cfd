#pragma once

// Dense complex linear-algebra helpers on top of Eigen.

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "graphdsp/config.hpp"

namespace graphdsp {

using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;

namespace linalg {

/// Induced 1-norm (max column sum).
inline double norm1(const CMatrix& m) {
    if (m.size() == 0) return 0.0;
    return m.cwiseAbs().colwise().sum().maxCoeff();
}

inline double max_abs(const CMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

/// Condition estimate ||V||_1 * ||V^-1||_1 from an already computed inverse.
inline double cond1(const CMatrix& v, const CMatrix& v_inv) { return norm1(v) * norm1(v_inv); }

inline Eigen::BDCSVD<CMatrix> svd(const CMatrix& m, bool thin_u, bool thin_v) {
    unsigned opts = 0;
    if (thin_u) opts |= Eigen::ComputeThinU;
    if (thin_v) opts |= Eigen::ComputeThinV;
    return Eigen::BDCSVD<CMatrix>(m, opts);
}

/// Numerical rank: singular values above `rel_tol * sigma_max` (or above `abs_floor`).
inline std::size_t rank(const CMatrix& m, double rel_tol, double abs_floor = 0.0) {
    if (m.size() == 0) return 0;
    Eigen::BDCSVD<CMatrix> s(m);
    const auto& sv = s.singularValues();
    const double cut = std::max(rel_tol * (sv.size() ? sv(0) : 0.0), abs_floor);
    std::size_t r = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > cut) ++r;
    return r;
}

/// Orthonormal basis of the null space of `m`, using an absolute singular-value cutoff.
inline CMatrix nullspace(const CMatrix& m, double abs_cut) {
    const Eigen::Index n = m.cols();
    Eigen::BDCSVD<CMatrix> s(m, Eigen::ComputeFullV);
    const auto& sv = s.singularValues();
    Eigen::Index r = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > abs_cut) ++r;
    return s.matrixV().rightCols(n - r);
}

/// Minimum-norm least squares with singular values below `rel_tol * sigma_max` dropped.
inline CVector lstsq_min_norm(const CMatrix& a, const CVector& b, double rel_tol, std::size_t* rank_out = nullptr) {
    Eigen::BDCSVD<CMatrix> s(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = s.singularValues();
    const double cut = sv.size() ? rel_tol * sv(0) : 0.0;
    CVector ub = s.matrixU().adjoint() * b;
    std::size_t r = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv(i) > cut && sv(i) > 0.0) {
            ub(i) /= sv(i);
            ++r;
        } else {
            ub(i) = 0.0;
        }
    }
    if (rank_out) *rank_out = r;
    return s.matrixV() * ub;
}

inline bool all_finite(const CMatrix& m) {
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag())) return false;
    return true;
}

inline std::string format(cplx z) {
    std::ostringstream os;
    os.precision(12);
    os << z.real();
    if (z.imag() != 0.0) os << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag()) << "i";
    return os.str();
}

} // namespace linalg
} // namespace graphdsp
