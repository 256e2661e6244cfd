#pragma once

// Exact Gaussian-rational arithmetic (re + i*im with rational parts) and the
// small dense matrix kernel the exact Jordan engine runs on.

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "graphdsp/config.hpp"
#include "graphdsp/linalg.hpp"

namespace graphdsp {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

class GaussRational {
public:
    GaussRational() = default;
    GaussRational(Rational re) : re_(std::move(re)) {}  // NOLINT(google-explicit-constructor)
    GaussRational(Rational re, Rational im) : re_(std::move(re)), im_(std::move(im)) {}
    GaussRational(int re) : re_(re) {}  // NOLINT(google-explicit-constructor)

    const Rational& real() const { return re_; }
    const Rational& imag() const { return im_; }

    bool is_zero() const { return re_ == 0 && im_ == 0; }
    GaussRational conj() const { return {re_, -im_}; }
    Rational norm2() const { return re_ * re_ + im_ * im_; }

    cplx to_complex() const { return {re_.convert_to<double>(), im_.convert_to<double>()}; }

    GaussRational& operator+=(const GaussRational& o) { re_ += o.re_; im_ += o.im_; return *this; }
    GaussRational& operator-=(const GaussRational& o) { re_ -= o.re_; im_ -= o.im_; return *this; }
    GaussRational& operator*=(const GaussRational& o) {
        Rational r = re_ * o.re_ - im_ * o.im_;
        im_ = re_ * o.im_ + im_ * o.re_;
        re_ = std::move(r);
        return *this;
    }
    GaussRational& operator/=(const GaussRational& o) {
        if (o.is_zero()) throw NumericalError("exact division by zero");
        const Rational d = o.norm2();
        Rational r = (re_ * o.re_ + im_ * o.im_) / d;
        im_ = (im_ * o.re_ - re_ * o.im_) / d;
        re_ = std::move(r);
        return *this;
    }
    friend GaussRational operator+(GaussRational a, const GaussRational& b) { return a += b; }
    friend GaussRational operator-(GaussRational a, const GaussRational& b) { return a -= b; }
    friend GaussRational operator*(GaussRational a, const GaussRational& b) { return a *= b; }
    friend GaussRational operator/(GaussRational a, const GaussRational& b) { return a /= b; }
    friend GaussRational operator-(const GaussRational& a) { return {-a.re_, -a.im_}; }
    friend bool operator==(const GaussRational& a, const GaussRational& b) { return a.re_ == b.re_ && a.im_ == b.im_; }
    friend bool operator!=(const GaussRational& a, const GaussRational& b) { return !(a == b); }

    /// Lexicographic (re, im) ordering used to sort eigenvalues.
    friend bool lex_less(const GaussRational& a, const GaussRational& b) {
        return a.re_ < b.re_ || (a.re_ == b.re_ && a.im_ < b.im_);
    }

    std::string str() const {
        std::string s = re_.str();
        if (im_ != 0) s += (im_ < 0 ? "-" : "+") + Rational(abs(im_)).str() + "i";
        return s;
    }

private:
    Rational re_{0};
    Rational im_{0};
};

namespace exact {

/// Continued-fraction convergents of the exact binary value of `x`, stopping once
/// the denominator exceeds `max_den`.
inline std::vector<Rational> convergents(double x, const BigInt& max_den = BigInt(1000000000)) {
    std::vector<Rational> out;
    if (!std::isfinite(x)) return out;
    Rational rest(x);
    // (p, q) = (p_{k-1}, q_{k-1}), (p_prev, q_prev) = (p_{k-2}, q_{k-2})
    BigInt p = 1, q = 0, p_prev = 0, q_prev = 1;
    for (int iter = 0; iter < 64; ++iter) {
        BigInt num = numerator(rest), den = denominator(rest);
        BigInt a = num / den;
        if (num < 0 && a * den != num) a -= 1;  // floor for negatives
        BigInt p_next = a * p + p_prev;
        BigInt q_next = a * q + q_prev;
        if (q_next > max_den) break;
        out.emplace_back(p_next, q_next);
        p_prev = p; p = p_next;
        q_prev = q; q = q_next;
        Rational frac = rest - Rational(a);
        if (frac == 0) break;
        rest = 1 / frac;
    }
    return out;
}

/// Smallest-denominator rational within `rel_tol * max(1,|x|)` of x, if one exists
/// with denominator up to `max_den`.
inline std::optional<Rational> rationalize(double x, double rel_tol = 1e-12,
                                           const BigInt& max_den = BigInt(1000000000)) {
    const double tol = rel_tol * std::max(1.0, std::abs(x));
    for (const auto& c : convergents(x, max_den))
        if (std::abs(c.convert_to<double>() - x) <= tol) return c;
    return std::nullopt;
}

inline std::optional<GaussRational> rationalize(cplx z, double rel_tol = 1e-12) {
    auto re = rationalize(z.real(), rel_tol);
    auto im = rationalize(z.imag(), rel_tol);
    if (!re || !im) return std::nullopt;
    return GaussRational(*re, *im);
}

/// Dense row-major matrix over Gaussian rationals.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
        return m;
    }

    /// Recognizes every entry as a Gaussian rational; throws if one is not.
    static Matrix from_complex(const CMatrix& a, double rel_tol = 1e-12) {
        Matrix m(static_cast<std::size_t>(a.rows()), static_cast<std::size_t>(a.cols()));
        for (Eigen::Index i = 0; i < a.rows(); ++i)
            for (Eigen::Index j = 0; j < a.cols(); ++j) {
                auto r = rationalize(a(i, j), rel_tol);
                if (!r)
                    throw ValidationError("exact backend: entry (" + std::to_string(i) + "," + std::to_string(j) +
                                          ") = " + linalg::format(a(i, j)) + " is not a recognizable rational");
                m(i, j) = *r;
            }
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    GaussRational& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const GaussRational& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    CMatrix to_complex() const {
        CMatrix out(static_cast<Eigen::Index>(rows_), static_cast<Eigen::Index>(cols_));
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) out(i, j) = (*this)(i, j).to_complex();
        return out;
    }

    std::vector<GaussRational> col(std::size_t j) const {
        std::vector<GaussRational> c(rows_);
        for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
        return c;
    }

    void set_col(std::size_t j, const std::vector<GaussRational>& c) {
        for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = c[i];
    }

    GaussRational trace() const {
        GaussRational t;
        for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
        return t;
    }

    bool is_zero() const {
        for (const auto& x : data_)
            if (!x.is_zero()) return false;
        return true;
    }

    friend Matrix operator*(const Matrix& a, const Matrix& b) {
        Matrix c(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const auto& aik = a(i, k);
                if (aik.is_zero()) continue;
                for (std::size_t j = 0; j < b.cols_; ++j)
                    if (!b(k, j).is_zero()) c(i, j) += aik * b(k, j);
            }
        return c;
    }

    friend std::vector<GaussRational> operator*(const Matrix& a, const std::vector<GaussRational>& v) {
        std::vector<GaussRational> out(a.rows_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t k = 0; k < a.cols_; ++k)
                if (!a(i, k).is_zero() && !v[k].is_zero()) out[i] += a(i, k) * v[k];
        return out;
    }

    friend Matrix operator+(Matrix a, const Matrix& b) {
        for (std::size_t i = 0; i < a.data_.size(); ++i) a.data_[i] += b.data_[i];
        return a;
    }
    friend Matrix operator-(Matrix a, const Matrix& b) {
        for (std::size_t i = 0; i < a.data_.size(); ++i) a.data_[i] -= b.data_[i];
        return a;
    }
    friend bool operator==(const Matrix& a, const Matrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<GaussRational> data_;
};

using Vector = std::vector<GaussRational>;

/// Reduced row echelon form in place; returns pivot columns.
inline std::vector<std::size_t> rref(Matrix& m) {
    std::vector<std::size_t> pivots;
    std::size_t row = 0;
    for (std::size_t c = 0; c < m.cols() && row < m.rows(); ++c) {
        std::size_t p = row;
        while (p < m.rows() && m(p, c).is_zero()) ++p;
        if (p == m.rows()) continue;
        if (p != row)
            for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m(p, j), m(row, j));
        const GaussRational inv = GaussRational(1) / m(row, c);
        for (std::size_t j = c; j < m.cols(); ++j) m(row, j) *= inv;
        for (std::size_t i = 0; i < m.rows(); ++i) {
            if (i == row || m(i, c).is_zero()) continue;
            const GaussRational f = m(i, c);
            for (std::size_t j = c; j < m.cols(); ++j) m(i, j) -= f * m(row, j);
        }
        pivots.push_back(c);
        ++row;
    }
    return pivots;
}

inline std::size_t rank(Matrix m) { return rref(m).size(); }

/// Rank of a set of column vectors.
inline std::size_t rank(const std::vector<Vector>& vs) {
    if (vs.empty()) return 0;
    Matrix m(vs.size(), vs.front().size());
    for (std::size_t i = 0; i < vs.size(); ++i)
        for (std::size_t j = 0; j < vs[i].size(); ++j) m(i, j) = vs[i][j];
    return rref(m).size();
}

/// Basis of the null space (one vector per free column).
inline std::vector<Vector> nullspace(Matrix m) {
    const auto pivots = rref(m);
    std::vector<bool> is_pivot(m.cols(), false);
    for (auto p : pivots) is_pivot[p] = true;
    std::vector<Vector> basis;
    for (std::size_t free = 0; free < m.cols(); ++free) {
        if (is_pivot[free]) continue;
        Vector v(m.cols());
        v[free] = 1;
        for (std::size_t r = 0; r < pivots.size(); ++r) v[pivots[r]] = -m(r, free);
        basis.push_back(std::move(v));
    }
    return basis;
}

/// Solves A X = B exactly; throws if A is singular.
inline Matrix solve(const Matrix& a, const Matrix& b) {
    const std::size_t n = a.rows();
    Matrix aug(n, n + b.cols());
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) aug(i, j) = a(i, j);
        for (std::size_t j = 0; j < b.cols(); ++j) aug(i, n + j) = b(i, j);
    }
    const auto piv = rref(aug);
    if (piv.size() < n || piv.back() >= n) throw NumericalError("exact solve: singular matrix");
    Matrix x(n, b.cols());
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) x(i, j) = aug(i, n + j);
    return x;
}

inline Matrix inverse(const Matrix& a) { return solve(a, Matrix::identity(a.rows())); }

} // namespace exact
} // namespace graphdsp
