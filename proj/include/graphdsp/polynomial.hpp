#pragma once

// Polynomials with ascending coefficients, generic over the coefficient field
// (complex doubles or exact Gaussian rationals).

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <utility>
#include <vector>

#include "graphdsp/config.hpp"
#include "graphdsp/exact.hpp"
#include "graphdsp/linalg.hpp"

namespace graphdsp {

template <class T>
struct ScalarTraits;

template <>
struct ScalarTraits<cplx> {
    static bool negligible(const cplx& c, double tol) { return std::abs(c) <= tol; }
    static double magnitude(const cplx& c) { return std::abs(c); }
    static cplx to_complex(const cplx& c) { return c; }
};

template <>
struct ScalarTraits<GaussRational> {
    static bool negligible(const GaussRational& c, double) { return c.is_zero(); }
    static double magnitude(const GaussRational& c) { return std::abs(c.to_complex()); }
    static cplx to_complex(const GaussRational& c) { return c.to_complex(); }
};

template <class T>
class BasicPolynomial {
public:
    using Scalar = T;
    static constexpr double kDefaultTrim = Tolerances{}.trim;

    BasicPolynomial() = default;
    explicit BasicPolynomial(std::vector<T> coeffs, double trim_tol = kDefaultTrim) : c_(std::move(coeffs)) {
        trim(trim_tol);
    }
    BasicPolynomial(std::initializer_list<T> coeffs) : c_(coeffs) { trim(kDefaultTrim); }

    static BasicPolynomial constant(T c) { return BasicPolynomial(std::vector<T>{std::move(c)}); }
    static BasicPolynomial x() { return BasicPolynomial(std::vector<T>{T(0), T(1)}); }

    /// Monic polynomial with the given roots, each repeated `mult` times.
    static BasicPolynomial from_roots(const std::vector<std::pair<T, std::size_t>>& roots) {
        BasicPolynomial p = constant(T(1));
        for (const auto& [root, mult] : roots)
            for (std::size_t k = 0; k < mult; ++k) p = p * BasicPolynomial(std::vector<T>{-root, T(1)}, 0.0);
        return p;
    }

    const std::vector<T>& coeffs() const { return c_; }
    bool is_zero() const { return c_.empty(); }
    int degree() const { return static_cast<int>(c_.size()) - 1; }
    std::size_t size() const { return c_.size(); }
    const T& operator[](std::size_t i) const { return c_[i]; }
    T coeff(std::size_t i) const { return i < c_.size() ? c_[i] : T(0); }
    const T& leading() const { return c_.back(); }

    /// Drops leading coefficients whose magnitude is at most `tol`.
    BasicPolynomial& trim(double tol = kDefaultTrim) {
        while (!c_.empty() && ScalarTraits<T>::negligible(c_.back(), tol)) c_.pop_back();
        return *this;
    }

    /// k-th derivative via exact coefficient manipulation.
    BasicPolynomial derivative(std::size_t k = 1) const {
        if (k == 0) return *this;
        if (c_.size() <= k) return {};
        std::vector<T> d(c_.size() - k);
        for (std::size_t i = k; i < c_.size(); ++i) d[i - k] = c_[i] * falling(i, k);
        return BasicPolynomial(std::move(d), 0.0);
    }

    /// p^{(deriv_order)}(x) by Horner on the differentiated coefficients.
    T operator()(const T& x, std::size_t deriv_order = 0) const {
        if (c_.size() <= deriv_order) return T(0);
        T acc(0);
        for (std::size_t i = c_.size(); i-- > deriv_order;) {
            acc = acc * x + c_[i] * falling(i, deriv_order);
        }
        return acc;
    }

    friend BasicPolynomial operator+(const BasicPolynomial& a, const BasicPolynomial& b) {
        std::vector<T> c(std::max(a.size(), b.size()), T(0));
        for (std::size_t i = 0; i < a.size(); ++i) c[i] += a.c_[i];
        for (std::size_t i = 0; i < b.size(); ++i) c[i] += b.c_[i];
        return BasicPolynomial(std::move(c));
    }
    friend BasicPolynomial operator-(const BasicPolynomial& a, const BasicPolynomial& b) {
        std::vector<T> c(std::max(a.size(), b.size()), T(0));
        for (std::size_t i = 0; i < a.size(); ++i) c[i] += a.c_[i];
        for (std::size_t i = 0; i < b.size(); ++i) c[i] -= b.c_[i];
        return BasicPolynomial(std::move(c));
    }
    friend BasicPolynomial operator*(const BasicPolynomial& a, const BasicPolynomial& b) {
        if (a.is_zero() || b.is_zero()) return {};
        std::vector<T> c(a.size() + b.size() - 1, T(0));
        for (std::size_t i = 0; i < a.size(); ++i)
            for (std::size_t j = 0; j < b.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
        return BasicPolynomial(std::move(c));
    }
    friend BasicPolynomial operator*(const T& s, const BasicPolynomial& p) {
        std::vector<T> c(p.c_);
        for (auto& x : c) x = s * x;
        return BasicPolynomial(std::move(c));
    }

    /// Long division a = q*m + r with deg r < deg m.
    static std::pair<BasicPolynomial, BasicPolynomial> divmod(const BasicPolynomial& a, const BasicPolynomial& m) {
        if (m.is_zero()) throw ValidationError("polynomial division by the zero polynomial");
        if (a.degree() < m.degree()) return {BasicPolynomial{}, a};
        std::vector<T> rem(a.c_);
        const std::size_t dm = m.size() - 1;
        std::vector<T> q(a.size() - dm, T(0));
        const T lead = m.leading();
        for (std::size_t k = q.size(); k-- > 0;) {
            T f = rem[k + dm] / lead;
            q[k] = f;
            for (std::size_t j = 0; j <= dm; ++j) rem[k + j] -= f * m.c_[j];
        }
        rem.resize(dm);
        return {BasicPolynomial(std::move(q)), BasicPolynomial(std::move(rem))};
    }

    friend BasicPolynomial operator%(const BasicPolynomial& a, const BasicPolynomial& m) { return divmod(a, m).second; }

    /// p(q(x)).
    BasicPolynomial compose(const BasicPolynomial& q) const {
        BasicPolynomial acc;
        for (std::size_t i = c_.size(); i-- > 0;) acc = acc * q + constant(c_[i]);
        return acc;
    }

    /// Euclidean norm of the coefficient vector.
    double norm() const {
        double s = 0.0;
        for (const auto& c : c_) {
            const double m = ScalarTraits<T>::magnitude(c);
            s += m * m;
        }
        return std::sqrt(s);
    }

    friend bool operator==(const BasicPolynomial& a, const BasicPolynomial& b) { return a.c_ == b.c_; }

private:
    // i! / (i-k)! as a scalar
    static T falling(std::size_t i, std::size_t k) {
        T f(1);
        for (std::size_t j = i - k + 1; j <= i; ++j) f = f * T(static_cast<int>(j));
        return f;
    }

    std::vector<T> c_;
};

using Polynomial = BasicPolynomial<cplx>;
using ExactPolynomial = BasicPolynomial<GaussRational>;

inline Polynomial to_complex(const ExactPolynomial& p) {
    std::vector<cplx> c;
    c.reserve(p.size());
    for (const auto& x : p.coeffs()) c.push_back(x.to_complex());
    return Polynomial(std::move(c), 0.0);
}

/// p^{(deriv_order)}(x).
inline cplx poly_eval(const Polynomial& p, cplx x, std::size_t deriv_order = 0) { return p(x, deriv_order); }

/// (a*b) mod m.
template <class T>
BasicPolynomial<T> poly_mod_mul(const BasicPolynomial<T>& a, const BasicPolynomial<T>& b, const BasicPolynomial<T>& m) {
    if (m.is_zero()) throw ValidationError("poly_mod_mul: zero modulus");
    return (a % m) * (b % m) % m;
}

/// p(A) by Horner's scheme on matrices.
inline CMatrix eval_matrix(const Polynomial& p, const CMatrix& a) {
    const Eigen::Index n = a.rows();
    CMatrix acc = CMatrix::Zero(n, n);
    for (std::size_t i = p.size(); i-- > 0;) {
        acc = acc * a;
        acc.diagonal().array() += p[i];
    }
    return acc;
}

inline exact::Matrix eval_matrix(const ExactPolynomial& p, const exact::Matrix& a) {
    exact::Matrix acc(a.rows(), a.cols());
    for (std::size_t i = p.size(); i-- > 0;) {
        acc = acc * a;
        for (std::size_t k = 0; k < a.rows(); ++k) acc(k, k) += p[i];
    }
    return acc;
}

} // namespace graphdsp
