#pragma once

// Polynomial graph filters: application, reduction, inversion, impulse responses,
// the equivalent shift, and the graph z-transform.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "graphdsp/config.hpp"
#include "graphdsp/exact.hpp"
#include "graphdsp/graph.hpp"
#include "graphdsp/hermite.hpp"
#include "graphdsp/linalg.hpp"
#include "graphdsp/poly_algebra.hpp"
#include "graphdsp/polynomial.hpp"
#include "graphdsp/spectral_basis.hpp"

namespace graphdsp {

/// h(A) represented by its taps. `graph_id == 0` means not bound to a graph.
struct GraphFilter {
    Polynomial taps;
    std::uint64_t graph_id = 0;

    void check_against(const Graph& g) const {
        if (graph_id != 0 && graph_id != g.fingerprint())
            throw ValidationError("filter was built for a different graph (fingerprint mismatch)");
    }
};

/// h(A) s by Horner's scheme: exactly deg(h) shifts, h(A) is never formed.
inline GraphSignal apply_filter(const Graph& g, const GraphFilter& f, const GraphSignal& s) {
    f.check_against(g);
    s.check_against(g);
    const auto& c = f.taps.coeffs();
    if (c.empty()) return GraphSignal(g, CVector::Zero(static_cast<Eigen::Index>(g.size())));
    CVector acc = c.back() * s.values();
    for (std::size_t i = c.size() - 1; i-- > 0;) acc = g.shift(acc) + c[i] * s.values();
    return GraphSignal(g, std::move(acc));
}

/// ||AH - HA||_F <= tol ||A||_F ||H||_F.
inline bool is_shift_invariant(const Graph& g, const CMatrix& h, double tol = 1e-10) {
    if (h.rows() != h.cols() || static_cast<std::size_t>(h.rows()) != g.size())
        throw ValidationError("is_shift_invariant: H must be N x N");
    const CMatrix a = g.dense();
    return (a * h - h * a).norm() <= tol * a.norm() * h.norm();
}

/// Taps h mod m; equal to h as a matrix when m is the minimal polynomial.
inline GraphFilter reduce_filter(const GraphFilter& f, const Polynomial& m) {
    if (m.is_zero()) throw ValidationError("reduce_filter: zero modulus");
    return {f.taps % m, f.graph_id};
}

/// Derivatives g^{(0..R-1)}(lambda) of g = 1/h, from the Leibniz rule applied to h g = 1.
template <class T>
std::vector<T> reciprocal_derivatives(const std::vector<T>& hd) {
    std::vector<T> gd(hd.size());
    const T inv = T(1) / hd[0];
    gd[0] = inv;
    for (std::size_t i = 1; i < hd.size(); ++i) {
        T acc(0);
        T binom(1);
        for (std::size_t k = 1; k <= i; ++k) {
            binom = binom * T(static_cast<int>(i - k + 1)) / T(static_cast<int>(k));
            acc = acc + binom * hd[k] * gd[i - k];
        }
        gd[i] = -(acc * inv);
    }
    return gd;
}

namespace detail {

inline std::optional<ExactPolynomial> rationalize_poly(const Polynomial& p) {
    std::vector<GaussRational> c;
    for (const auto& x : p.coeffs()) {
        auto r = exact::rationalize(x);
        if (!r) return std::nullopt;
        c.push_back(*r);
    }
    return ExactPolynomial(std::move(c), 0.0);
}

inline ExactPolynomial to_exact_poly(const Polynomial& p) {
    std::vector<GaussRational> c;
    for (const auto& x : p.coeffs()) c.emplace_back(Rational(x.real()), Rational(x.imag()));
    return ExactPolynomial(std::move(c), 0.0);
}

inline GaussRational to_exact(cplx z) {
    if (auto r = exact::rationalize(z, 1e-12)) return *r;
    return {Rational(z.real()), Rational(z.imag())};
}

} // namespace detail

/// g with g(A) h(A) = I and deg g < N_A. Throws NonInvertibleError when h vanishes
/// at an eigenvalue.
inline GraphFilter invert_filter(const GraphFilter& f, const SpectralBasis& basis, const Tolerances& tol = {}) {
    const Polynomial& h = f.taps;
    const double hnorm = h.norm();
    for (const auto& lambda : basis.eigenvalues())
        if (!(std::abs(h(lambda)) > tol.inverse * hnorm))
            throw NonInvertibleError("filter is not invertible: h(" + linalg::format(lambda) + ") = " +
                                     linalg::format(h(lambda)), lambda);

    const auto& ex = basis.exact_data();
    if (ex) {
        if (auto he = detail::rationalize_poly(h)) {
            std::vector<ExactHermiteConstraint> cons;
            for (std::size_t m = 0; m < ex->eigenvalues.size(); ++m) {
                std::vector<GaussRational> hd;
                for (std::size_t k = 0; k < basis.index(m); ++k) hd.push_back((*he)(ex->eigenvalues[m], k));
                if (hd[0].is_zero())
                    throw NonInvertibleError("filter is not invertible: h(" + ex->eigenvalues[m].str() + ") = 0",
                                             basis.eigenvalues()[m]);
                cons.push_back({ex->eigenvalues[m], reciprocal_derivatives(hd)});
            }
            return {to_complex(hermite_interpolate(cons)), f.graph_id ? f.graph_id : basis.graph_id()};
        }
    }
    std::vector<HermiteConstraint> cons;
    for (std::size_t m = 0; m < basis.eigenvalues().size(); ++m) {
        std::vector<cplx> hd;
        for (std::size_t k = 0; k < basis.index(m); ++k) hd.push_back(h(basis.eigenvalues()[m], k));
        cons.push_back({basis.eigenvalues()[m], reciprocal_derivatives(hd)});
    }
    return {hermite_interpolate(cons, tol), f.graph_id ? f.graph_id : basis.graph_id()};
}

/// h(A) delta with delta the impulse at node 0.
inline GraphSignal impulse_response(const Graph& g, const GraphFilter& f) {
    CVector delta = CVector::Zero(static_cast<Eigen::Index>(g.size()));
    delta(0) = 1.0;
    return apply_filter(g, f, GraphSignal(g, delta));
}

/// Reduced taps h (deg h < n_a) with (delta, A delta, ..., A^{n_a-1} delta) h = u.
/// Throws RankDeficiencyError when that Krylov matrix has rank below n_a or u is
/// not reachable.
inline GraphFilter taps_from_impulse(const Graph& g, const GraphSignal& u, std::size_t n_a, const Tolerances& tol = {}) {
    u.check_against(g);
    if (n_a == 0 || n_a > g.size()) throw ValidationError("taps_from_impulse: N_A must be in [1, N]");
    const auto n = static_cast<Eigen::Index>(g.size());
    CMatrix krylov(n, static_cast<Eigen::Index>(n_a));
    RVector scale(static_cast<Eigen::Index>(n_a));
    CVector col = CVector::Zero(n);
    col(0) = 1.0;
    for (std::size_t k = 0; k < n_a; ++k) {
        if (k > 0) col = g.shift(col);
        const double s = col.norm();
        scale(static_cast<Eigen::Index>(k)) = s > 0.0 ? 1.0 / s : 1.0;
        krylov.col(static_cast<Eigen::Index>(k)) = col * scale(static_cast<Eigen::Index>(k));
    }
    std::size_t rank = 0;
    CVector h = linalg::lstsq_min_norm(krylov, u.values(), tol.rank, &rank);
    if (rank < n_a)
        throw RankDeficiencyError("taps_from_impulse: rank of the impulse Krylov matrix is " + std::to_string(rank) +
                                  " < N_A = " + std::to_string(n_a) + "; taps are not recoverable");
    const double res = (krylov * h - u.values()).norm();
    if (res > tol.solve * std::max(1.0, u.values().norm()))
        throw RankDeficiencyError("taps_from_impulse: signal is not the impulse response of any filter (residual " +
                                  std::to_string(res) + ")");
    h = scale.asDiagonal() * h;
    return {Polynomial(std::vector<cplx>(h.data(), h.data() + h.size()), 0.0), g.fingerprint()};
}

inline GraphFilter taps_from_impulse(const Graph& g, const GraphSignal& u, const SpectralBasis& basis,
                                     const Tolerances& tol = {}) {
    return taps_from_impulse(g, u, basis.filter_dimension(), tol);
}

/// A = r(A~) with A~ nonderogatory (one Jordan chain per eigenvalue).
struct EquivalentShift {
    Graph shift;
    Polynomial r;
    SpectralBasis basis;
};

/// Equivalent shift with explicitly chosen substitutes: `substitutes[m][d]` replaces
/// the eigenvalue of chain d of eigenvalue m.
inline EquivalentShift equivalent_shift(const Graph& g, const SpectralBasis& basis,
                                        const std::vector<std::vector<cplx>>& substitutes, const Tolerances& tol = {}) {
    if (basis.size() != g.size()) throw ValidationError("equivalent_shift: basis does not match the graph");
    if (substitutes.size() != basis.eigenvalues().size())
        throw ValidationError("equivalent_shift: one substitute list per eigenvalue is required");
    struct Item {
        cplx point;
        std::size_t block;
    };
    std::vector<Item> items;
    std::size_t bi = 0;
    for (std::size_t m = 0; m < substitutes.size(); ++m) {
        if (substitutes[m].size() != basis.geometric_multiplicity(m))
            throw ValidationError("equivalent_shift: one substitute per Jordan chain is required");
        for (const auto& z : substitutes[m]) items.push_back({z, bi++});
    }
    for (std::size_t i = 0; i < items.size(); ++i)
        for (std::size_t j = i + 1; j < items.size(); ++j)
            if (std::abs(items[i].point - items[j].point) <= tol.lambda_sep)
                throw ValidationError("equivalent_shift: substitutes must be pairwise distinct");

    const auto& blocks = basis.blocks();
    const auto& ex = basis.exact_data();
    const std::size_t n = basis.size();

    // New ordering of the blocks by lexicographic substitute value.
    std::vector<std::size_t> order(items.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::vector<GaussRational> sub_exact;
    if (ex)
        for (const auto& it : items) sub_exact.push_back(detail::to_exact(it.point));
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        if (ex) return lex_less(sub_exact[x], sub_exact[y]);
        const cplx a = items[x].point, b = items[y].point;
        return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
    });

    std::vector<cplx> eig;
    std::vector<std::vector<std::size_t>> lens;
    std::vector<std::size_t> perm;  // new column -> old column
    for (auto idx : order) {
        const auto& b = blocks[items[idx].block];
        eig.push_back(ex ? sub_exact[idx].to_complex() : items[idx].point);
        lens.push_back({b.length});
        for (std::size_t r = 0; r < b.length; ++r) perm.push_back(b.offset + r);
    }

    Polynomial r;
    Graph shift;
    std::optional<ExactJordanData> new_exact;
    CMatrix v(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)), f(v.rows(), v.cols());
    for (std::size_t c = 0; c < n; ++c) {
        v.col(static_cast<Eigen::Index>(c)) = basis.v().col(static_cast<Eigen::Index>(perm[c]));
        f.row(static_cast<Eigen::Index>(c)) = basis.f().row(static_cast<Eigen::Index>(perm[c]));
    }

    if (ex) {
        std::vector<ExactHermiteConstraint> cons;
        exact::Matrix vj(n, n), fj(n, n), jt(n, n);
        std::vector<GaussRational> eig_ex;
        std::size_t col = 0;
        for (auto idx : order) {
            const auto& b = blocks[items[idx].block];
            std::vector<GaussRational> vals(b.length, GaussRational(0));
            vals[0] = ex->eigenvalues[b.eigen];
            if (b.length >= 2) vals[1] = 1;
            cons.push_back({sub_exact[idx], vals});
            eig_ex.push_back(sub_exact[idx]);
            for (std::size_t k = 0; k < b.length; ++k, ++col) {
                jt(col, col) = sub_exact[idx];
                if (k + 1 < b.length) jt(col, col + 1) = 1;
            }
        }
        for (std::size_t c = 0; c < n; ++c)
            for (std::size_t i = 0; i < n; ++i) {
                vj(i, c) = ex->v(i, perm[c]);
                fj(c, i) = ex->f(perm[c], i);
            }
        r = to_complex(hermite_interpolate(cons));
        const exact::Matrix at = vj * jt * fj;
        shift = Graph::from_adjacency(at.to_complex());
        new_exact = ExactJordanData{std::move(eig_ex), at, std::move(vj), std::move(fj)};
    } else {
        std::vector<HermiteConstraint> cons;
        for (auto idx : order) {
            const auto& b = blocks[items[idx].block];
            std::vector<cplx> vals(b.length, 0.0);
            vals[0] = basis.eigenvalues()[b.eigen];
            if (b.length >= 2) vals[1] = 1.0;
            cons.push_back({items[idx].point, vals});
        }
        r = hermite_interpolate(cons, tol);
        CMatrix jt = CMatrix::Zero(v.rows(), v.cols());
        Eigen::Index col = 0;
        for (auto idx : order) {
            const auto len = static_cast<Eigen::Index>(blocks[items[idx].block].length);
            for (Eigen::Index k = 0; k < len; ++k, ++col) {
                jt(col, col) = items[idx].point;
                if (k + 1 < len) jt(col, col + 1) = 1.0;
            }
        }
        shift = Graph::from_adjacency(v * jt * f);
    }
    SpectralBasis nb(std::move(eig), std::move(lens), std::move(v), std::move(f), basis.backend(), shift.fingerprint(),
                     std::move(new_exact));
    return {std::move(shift), std::move(r), std::move(nb)};
}

/// Substitutes lambda_m + d * eps * (1 + |lambda_m|), eps = 1/(4 max_m D_m), halving
/// eps until all substitutes are pairwise separated. Nonderogatory shifts are
/// returned unchanged with r(x) = x.
inline EquivalentShift equivalent_shift(const Graph& g, const SpectralBasis& basis, const Tolerances& tol = {}) {
    if (basis.is_nonderogatory()) return {g, Polynomial::x(), basis};
    std::size_t max_d = 1;
    for (std::size_t m = 0; m < basis.eigenvalues().size(); ++m) max_d = std::max(max_d, basis.geometric_multiplicity(m));
    double eps = 1.0 / (4.0 * static_cast<double>(max_d));
    for (int attempt = 0; attempt < 60; ++attempt, eps *= 0.5) {
        std::vector<std::vector<cplx>> subs;
        std::vector<cplx> all;
        for (std::size_t m = 0; m < basis.eigenvalues().size(); ++m) {
            const cplx lambda = basis.eigenvalues()[m];
            subs.emplace_back();
            for (std::size_t d = 0; d < basis.geometric_multiplicity(m); ++d) {
                subs.back().push_back(lambda + static_cast<double>(d) * eps * (1.0 + std::abs(lambda)));
                all.push_back(subs.back().back());
            }
        }
        bool separated = true;
        for (std::size_t i = 0; i < all.size() && separated; ++i)
            for (std::size_t j = i + 1; j < all.size(); ++j)
                if (std::abs(all[i] - all[j]) <= std::max(tol.lambda_sep, 1e-3 * eps)) {
                    separated = false;
                    break;
                }
        if (separated) return equivalent_shift(g, basis, subs, tol);
    }
    throw NumericalError("equivalent_shift: could not find separated substitute eigenvalues");
}

/// Basis polynomials b_0..b_{N-1} of the graph z-transform, from a Jordan basis of
/// A^T: b_n^{(r)}(lambda_m) = r! * (column r of the chain of lambda_m)[n].
inline std::vector<Polynomial> z_transform_basis(const Graph& g, const SpectralBasis& basis_of_transpose,
                                                 const Tolerances& tol = {}) {
    const SpectralBasis& bt = basis_of_transpose;
    if (bt.size() != g.size()) throw ValidationError("z_transform_basis: basis does not match the graph");
    if (!bt.is_nonderogatory())
        throw ValidationError("z_transform_basis: the shift is derogatory (characteristic != minimal polynomial); "
                              "construct an equivalent shift first");
    const std::size_t n = g.size();
    std::vector<Polynomial> out;
    out.reserve(n);
    const auto& ex = bt.exact_data();
    for (std::size_t node = 0; node < n; ++node) {
        if (ex) {
            std::vector<ExactHermiteConstraint> cons;
            for (const auto& b : bt.blocks()) {
                std::vector<GaussRational> vals;
                GaussRational fact(1);
                for (std::size_t r = 0; r < b.length; ++r) {
                    if (r > 0) fact *= GaussRational(static_cast<int>(r));
                    vals.push_back(fact * ex->v(node, b.offset + r));
                }
                cons.push_back({ex->eigenvalues[b.eigen], std::move(vals)});
            }
            out.push_back(to_complex(hermite_interpolate(cons)));
        } else {
            std::vector<HermiteConstraint> cons;
            for (const auto& b : bt.blocks()) {
                std::vector<cplx> vals;
                double fact = 1.0;
                for (std::size_t r = 0; r < b.length; ++r) {
                    if (r > 0) fact *= static_cast<double>(r);
                    vals.push_back(fact * bt.v()(static_cast<Eigen::Index>(node), static_cast<Eigen::Index>(b.offset + r)));
                }
                cons.push_back({bt.eigenvalues()[b.eigen], std::move(vals)});
            }
            out.push_back(hermite_interpolate(cons, tol));
        }
    }
    return out;
}

/// s~(x) = sum_n s_n b_n(x).
inline Polynomial z_transform(const std::vector<Polynomial>& b, const GraphSignal& s) {
    if (b.size() != s.size()) throw ValidationError("z_transform: basis size does not match the signal");
    Polynomial acc;
    for (std::size_t n = 0; n < b.size(); ++n) acc = acc + Polynomial(std::vector<cplx>{s[n]}, 0.0) * b[n];
    return acc;
}

/// Coordinates s with sum_n s_n b_n = p, for deg p < N.
inline GraphSignal z_inverse(const std::vector<Polynomial>& b, const Polynomial& p) {
    const auto n = static_cast<Eigen::Index>(b.size());
    if (p.degree() >= n) throw ValidationError("z_inverse: polynomial degree must be below N");
    CMatrix m = CMatrix::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < n; ++i) m(i, j) = b[static_cast<std::size_t>(j)].coeff(static_cast<std::size_t>(i));
    CVector rhs(n);
    for (Eigen::Index i = 0; i < n; ++i) rhs(i) = p.coeff(static_cast<std::size_t>(i));
    Eigen::FullPivLU<CMatrix> lu(m);
    if (!lu.isInvertible()) throw NumericalError("z_inverse: basis polynomials are linearly dependent");
    return GraphSignal(CVector(lu.solve(rhs)));
}

/// Filtering in the z-domain: coordinates of (h s~) mod p_A.
inline GraphSignal z_filter(const std::vector<Polynomial>& b, const Polynomial& char_poly, const Polynomial& h,
                            const GraphSignal& s) {
    return z_inverse(b, poly_mod_mul(h, z_transform(b, s), char_poly));
}

} // namespace graphdsp
