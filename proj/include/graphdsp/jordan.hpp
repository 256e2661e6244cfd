#pragma once

// Jordan decomposition A = V J V^-1 with a numeric backend (eigensolvers plus an
// optional nullspace staircase for defective clusters) and an exact backend over
// Gaussian rationals.

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "graphdsp/config.hpp"
#include "graphdsp/exact.hpp"
#include "graphdsp/graph.hpp"
#include "graphdsp/linalg.hpp"
#include "graphdsp/poly_algebra.hpp"
#include "graphdsp/polynomial.hpp"
#include "graphdsp/spectral_basis.hpp"

namespace graphdsp {

struct JordanOptions {
    Backend backend = Backend::numeric;
    /// Run the numeric staircase on defective clusters instead of refusing.
    bool allow_numeric_defective = false;
    std::size_t numeric_limit = 4096;
    std::size_t exact_limit = 64;
    /// Extra eigenvalue guesses for the exact backend (each is rationalized and tested).
    std::vector<cplx> eigenvalue_hints;
};

namespace detail {

// Builds Jordan chains for one eigenvalue from B = A - lambda I.
// Returns chains as [v_0 (eigenvector), ..., v_{len-1} (top)], longest first.
template <class Policy>
std::vector<std::vector<typename Policy::Vec>> staircase_chains(const Policy& pol, const typename Policy::Mat& b,
                                                               std::size_t alg_mult) {
    using Vec = typename Policy::Vec;
    std::vector<std::vector<Vec>> kernels{{}};
    typename Policy::Mat bk = b;
    while (kernels.back().size() < alg_mult) {
        if (kernels.size() > alg_mult)
            throw DecompositionError("Jordan staircase did not reach the algebraic multiplicity " +
                                     std::to_string(alg_mult));
        auto ns = pol.null(bk);
        if (ns.size() <= kernels.back().size())
            throw DecompositionError("Jordan staircase stalled at nullity " + std::to_string(ns.size()) +
                                     " (algebraic multiplicity " + std::to_string(alg_mult) + ")");
        kernels.push_back(std::move(ns));
        bk = pol.mul(bk, b);
    }
    if (kernels.back().size() != alg_mult)
        throw DecompositionError("Jordan staircase overshot: nullity " + std::to_string(kernels.back().size()) +
                                 " exceeds algebraic multiplicity " + std::to_string(alg_mult));

    struct Chain {
        Vec top;
        std::size_t len;
    };
    std::vector<Chain> chains;
    for (std::size_t k = kernels.size() - 1; k >= 1; --k) {
        std::vector<Vec> span = kernels[k - 1];
        for (const auto& c : chains) {
            Vec w = c.top;
            for (std::size_t i = 0; i < c.len - k; ++i) w = pol.apply(b, w);
            span.push_back(std::move(w));
        }
        std::size_t r = pol.rank(span);
        for (const auto& v : kernels[k]) {
            span.push_back(v);
            const std::size_t r2 = pol.rank(span);
            if (r2 > r) {
                chains.push_back({v, k});
                r = r2;
            } else {
                span.pop_back();
            }
        }
    }

    std::vector<std::vector<Vec>> out;
    std::size_t total = 0;
    for (const auto& c : chains) {
        std::vector<Vec> vs(c.len);
        vs[c.len - 1] = c.top;
        for (std::size_t r = c.len - 1; r-- > 0;) vs[r] = pol.apply(b, vs[r + 1]);
        total += c.len;
        out.push_back(std::move(vs));
    }
    if (total != alg_mult)
        throw DecompositionError("Jordan staircase produced chains of total length " + std::to_string(total) +
                                 ", expected " + std::to_string(alg_mult));
    return out;
}

struct NumericPolicy {
    using Vec = CVector;
    using Mat = CMatrix;
    double null_rel;
    double rank_rel;

    std::vector<Vec> null(const Mat& m) const {
        Eigen::BDCSVD<CMatrix> s(m, Eigen::ComputeFullV);
        const auto& sv = s.singularValues();
        const double cut = null_rel * (sv.size() ? sv(0) : 0.0);
        Eigen::Index r = 0;
        for (Eigen::Index i = 0; i < sv.size(); ++i)
            if (sv(i) > cut) ++r;
        std::vector<Vec> out;
        for (Eigen::Index j = r; j < m.cols(); ++j) out.push_back(s.matrixV().col(j));
        return out;
    }
    std::size_t rank(const std::vector<Vec>& vs) const {
        if (vs.empty()) return 0;
        CMatrix m(vs.front().size(), static_cast<Eigen::Index>(vs.size()));
        for (std::size_t j = 0; j < vs.size(); ++j) {
            const double nrm = vs[j].norm();
            m.col(static_cast<Eigen::Index>(j)) = nrm > 0.0 ? CVector(vs[j] / nrm) : vs[j];
        }
        return linalg::rank(m, rank_rel);
    }
    Mat mul(const Mat& a, const Mat& b) const { return a * b; }
    Vec apply(const Mat& a, const Vec& v) const { return a * v; }
};

struct ExactPolicy {
    using Vec = exact::Vector;
    using Mat = exact::Matrix;
    std::vector<Vec> null(const Mat& m) const { return exact::nullspace(m); }
    std::size_t rank(const std::vector<Vec>& vs) const { return exact::rank(vs); }
    Mat mul(const Mat& a, const Mat& b) const { return a * b; }
    Vec apply(const Mat& a, const Vec& v) const { return a * v; }
};

// Groups values whose pairwise distance is at most `tol` (transitively).
inline std::vector<std::vector<std::size_t>> cluster_values(const std::vector<cplx>& vals, double tol) {
    const std::size_t n = vals.size();
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (std::abs(vals[i] - vals[j]) <= tol) parent[find(i)] = find(j);
    std::vector<std::vector<std::size_t>> groups;
    std::vector<long> slot(n, -1);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t r = find(i);
        if (slot[r] < 0) {
            slot[r] = static_cast<long>(groups.size());
            groups.emplace_back();
        }
        groups[static_cast<std::size_t>(slot[r])].push_back(i);
    }
    return groups;
}

inline cplx mean_of(const std::vector<cplx>& vals, const std::vector<std::size_t>& idx) {
    cplx s = 0.0;
    for (auto i : idx) s += vals[i];
    return s / static_cast<double>(idx.size());
}

// Scales v to unit norm and rotates its phase so the first significant entry is real positive.
inline void normalize_phase(CVector& v) {
    const double nrm = v.norm();
    if (nrm == 0.0) return;
    v /= nrm;
    const double big = v.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < v.size(); ++i)
        if (std::abs(v(i)) > 1e-8 * big) {
            v *= std::conj(v(i)) / std::abs(v(i));
            v(i) = std::abs(v(i));
            break;
        }
}

struct EigenGroup {
    cplx lambda;
    std::vector<std::vector<CVector>> chains;
};

inline SpectralBasis assemble_numeric(std::vector<EigenGroup> groups, double scale, double cluster_tol,
                                      const Tolerances& tol, std::uint64_t graph_id, const CMatrix& a) {
    const double re_tol = cluster_tol * scale;
    std::stable_sort(groups.begin(), groups.end(), [re_tol](const EigenGroup& x, const EigenGroup& y) {
        if (std::abs(x.lambda.real() - y.lambda.real()) > re_tol) return x.lambda.real() < y.lambda.real();
        return x.lambda.imag() < y.lambda.imag();
    });
    const auto n = a.rows();
    CMatrix v(n, n);
    std::vector<cplx> eig;
    std::vector<std::vector<std::size_t>> lens;
    Eigen::Index col = 0;
    for (auto& g : groups) {
        eig.push_back(g.lambda);
        lens.emplace_back();
        for (auto& ch : g.chains) {
            lens.back().push_back(ch.size());
            for (auto& vec : ch) v.col(col++) = vec;
        }
    }
    Eigen::PartialPivLU<CMatrix> lu(v);
    CMatrix f = lu.solve(CMatrix::Identity(n, n));
    if (!linalg::all_finite(f)) throw DecompositionError("generalized eigenvector matrix V is singular");
    SpectralBasis basis(std::move(eig), std::move(lens), std::move(v), std::move(f), Backend::numeric, graph_id);
    if (!(basis.cond_v() <= tol.max_cond_v))
        throw DecompositionError("numeric Jordan basis is ill-conditioned (cond(V) ~ " + std::to_string(basis.cond_v()) +
                                 "); use the exact backend");
    return basis;
}

inline SpectralBasis numeric_decompose(const CMatrix& a, const JordanOptions& opts, const Tolerances& tol,
                                       std::uint64_t graph_id) {
    const Eigen::Index n = a.rows();
    const double anorm = std::max(1.0, linalg::norm1(a));
    const bool hermitian = linalg::max_abs(a - a.adjoint()) <= tol.hermitian * std::max(1.0, linalg::max_abs(a));

    std::vector<EigenGroup> groups;
    double scale = 1.0;
    if (hermitian) {
        const CMatrix ah = 0.5 * (a + a.adjoint());
        Eigen::SelfAdjointEigenSolver<CMatrix> es(ah);
        if (es.info() != Eigen::Success) throw DecompositionError("Hermitian eigensolver did not converge");
        std::vector<cplx> vals;
        for (Eigen::Index i = 0; i < n; ++i) {
            vals.emplace_back(es.eigenvalues()(i), 0.0);
            scale = std::max(scale, std::abs(es.eigenvalues()(i)));
        }
        for (const auto& idx : cluster_values(vals, tol.cluster * scale)) {
            EigenGroup g{mean_of(vals, idx), {}};
            for (auto i : idx) {
                CVector vec = es.eigenvectors().col(static_cast<Eigen::Index>(i));
                normalize_phase(vec);
                g.chains.push_back({vec});
            }
            groups.push_back(std::move(g));
        }
        // Orthonormal eigenvectors: F = V^H exactly.
        SpectralBasis nb = assemble_numeric(std::move(groups), scale, tol.cluster, tol, graph_id, a);
        CMatrix v = nb.v();
        return SpectralBasis(nb.eigenvalues(), nb.chains(), v, v.adjoint(), Backend::numeric, graph_id);
    }

    Eigen::ComplexEigenSolver<CMatrix> es(a, true);
    if (es.info() != Eigen::Success) throw DecompositionError("eigensolver did not converge");
    std::vector<cplx> vals(es.eigenvalues().data(), es.eigenvalues().data() + n);
    for (const auto& x : vals) scale = std::max(scale, std::abs(x));

    for (const auto& idx : cluster_values(vals, tol.cluster * scale)) {
        const cplx lambda = mean_of(vals, idx);
        EigenGroup g{lambda, {}};
        if (idx.size() == 1) {
            CVector vec = es.eigenvectors().col(static_cast<Eigen::Index>(idx[0]));
            normalize_phase(vec);
            g.chains.push_back({vec});
            groups.push_back(std::move(g));
            continue;
        }
        const CMatrix b = a - lambda * CMatrix::Identity(n, n);
        const CMatrix ns = linalg::nullspace(b, tol.cluster * anorm);
        if (static_cast<std::size_t>(ns.cols()) == idx.size()) {
            for (Eigen::Index j = 0; j < ns.cols(); ++j) {
                CVector vec = ns.col(j);
                normalize_phase(vec);
                g.chains.push_back({vec});
            }
            groups.push_back(std::move(g));
            continue;
        }
        if (!opts.allow_numeric_defective)
            throw DecompositionError("eigenvalue " + linalg::format(lambda) + " is defective (algebraic multiplicity " +
                                     std::to_string(idx.size()) + ", geometric " + std::to_string(ns.cols()) +
                                     "); use the exact backend or allow numeric defective decomposition");
        NumericPolicy pol{tol.cluster, std::sqrt(tol.cluster)};
        for (auto& ch : staircase_chains(pol, b, idx.size())) {
            const double s = ch.back().norm();
            for (auto& vec : ch) vec /= s;
            g.chains.push_back(std::move(ch));
        }
        groups.push_back(std::move(g));
    }
    return assemble_numeric(std::move(groups), scale, tol.cluster, tol, graph_id, a);
}

// Exact roots of the characteristic polynomial with multiplicities, found by
// rationalizing numeric eigenvalue estimates and testing each candidate exactly.
inline std::vector<std::pair<GaussRational, std::size_t>> exact_eigenvalues(const ExactPolynomial& p,
                                                                            const CMatrix& a_num,
                                                                            const std::vector<cplx>& hints) {
    std::vector<cplx> estimates = hints;
    Eigen::ComplexEigenSolver<CMatrix> es(a_num, false);
    std::vector<cplx> vals(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
    double scale = 1.0;
    for (const auto& x : vals) scale = std::max(scale, std::abs(x));
    for (double rel : {1e-6, 1e-3, 1e-1})
        for (const auto& idx : cluster_values(vals, rel * scale)) estimates.push_back(mean_of(vals, idx));
    estimates.insert(estimates.end(), vals.begin(), vals.end());

    auto nearby = [](double x, double bound) {
        std::vector<Rational> out;
        for (const auto& c : exact::convergents(x, BigInt(1000000)))
            if (std::abs(c.convert_to<double>() - x) <= bound) out.push_back(c);
        if (out.empty()) out.emplace_back(0);
        return out;
    };

    ExactPolynomial q = p;
    std::vector<std::pair<GaussRational, std::size_t>> roots;
    const ExactPolynomial one = ExactPolynomial::constant(GaussRational(1));
    for (const auto& mu : estimates) {
        if (q.degree() <= 0) break;
        const double bound = 0.05 * (1.0 + std::abs(mu));
        const auto res = nearby(mu.real(), bound);
        const auto ims = nearby(mu.imag(), bound);
        std::optional<GaussRational> root;
        for (std::size_t s = 0; s < res.size() + ims.size() && !root; ++s)
            for (std::size_t i = 0; i <= s && !root; ++i) {
                const std::size_t j = s - i;
                if (i >= res.size() || j >= ims.size()) continue;
                GaussRational cand(res[i], ims[j]);
                if (q(cand).is_zero()) root = cand;
            }
        if (!root) continue;
        const ExactPolynomial lin(std::vector<GaussRational>{-*root, GaussRational(1)}, 0.0);
        std::size_t mult = 0;
        while (q.degree() >= 1) {
            auto [quot, rem] = ExactPolynomial::divmod(q, lin);
            if (!rem.is_zero()) break;
            q = quot;
            ++mult;
        }
        roots.emplace_back(*root, mult);
    }
    if (q.degree() > 0)
        throw DecompositionError("exact backend: characteristic polynomial has " + std::to_string(q.degree()) +
                                 " root(s) that are not recognizable Gaussian rationals; supply eigenvalue hints");
    std::sort(roots.begin(), roots.end(), [](const auto& x, const auto& y) { return lex_less(x.first, y.first); });
    return roots;
}

inline SpectralBasis exact_decompose(const CMatrix& a_num, const JordanOptions& opts, std::uint64_t graph_id) {
    const std::size_t n = static_cast<std::size_t>(a_num.rows());
    const exact::Matrix a = exact::Matrix::from_complex(a_num);
    const ExactPolynomial p = char_poly(a);
    const auto roots = exact_eigenvalues(p, a_num, opts.eigenvalue_hints);

    exact::Matrix v(n, n);
    std::vector<GaussRational> eig;
    std::vector<cplx> eig_num;
    std::vector<std::vector<std::size_t>> lens;
    std::size_t col = 0;
    ExactPolicy pol;
    for (const auto& [lambda, mult] : roots) {
        exact::Matrix b = a;
        for (std::size_t i = 0; i < n; ++i) b(i, i) -= lambda;
        eig.push_back(lambda);
        eig_num.push_back(lambda.to_complex());
        lens.emplace_back();
        for (const auto& ch : staircase_chains(pol, b, mult)) {
            lens.back().push_back(ch.size());
            for (const auto& vec : ch) v.set_col(col++, vec);
        }
    }
    exact::Matrix f = exact::inverse(v);
    CMatrix vn = v.to_complex(), fn = f.to_complex();
    return SpectralBasis(std::move(eig_num), std::move(lens), std::move(vn), std::move(fn), Backend::exact, graph_id,
                         ExactJordanData{std::move(eig), a, std::move(v), std::move(f)});
}

} // namespace detail

/// Largest chain residual max ||(A - lambda I) v_r - v_{r-1}|| over all columns, relative to ||V||.
inline double chain_residual(const CMatrix& a, const SpectralBasis& basis) {
    const CMatrix r = a * basis.v() - basis.v() * basis.jordan_matrix();
    return linalg::norm1(r) / std::max(1e-300, linalg::norm1(basis.v()));
}

/// Computes the Jordan decomposition of a square matrix.
inline SpectralBasis jordan_decompose(const CMatrix& a, const JordanOptions& opts = {}, const Tolerances& tol = {},
                                      std::uint64_t graph_id = 0) {
    if (a.rows() != a.cols() || a.rows() == 0) throw ValidationError("jordan_decompose: matrix must be square and nonempty");
    if (!linalg::all_finite(a)) throw ValidationError("jordan_decompose: non-finite entries");
    const auto n = static_cast<std::size_t>(a.rows());
    const std::size_t limit = opts.backend == Backend::exact ? opts.exact_limit : opts.numeric_limit;
    if (n > limit)
        throw ValidationError("jordan_decompose: N=" + std::to_string(n) + " exceeds the " +
                              std::string(to_string(opts.backend)) + " backend limit of " + std::to_string(limit));

    SpectralBasis basis = opts.backend == Backend::exact ? detail::exact_decompose(a, opts, graph_id)
                                                         : detail::numeric_decompose(a, opts, tol, graph_id);
    if (opts.backend == Backend::numeric) {
        const double res = chain_residual(a, basis);
        const double anorm = std::max(1.0, linalg::norm1(a));
        if (!(res <= tol.chain * anorm))
            throw DecompositionError("Jordan chain residual " + std::to_string(res) + " exceeds " +
                                     std::to_string(tol.chain * anorm) + "; use the exact backend");
        const double inv_err = linalg::max_abs(basis.f() * basis.v() - CMatrix::Identity(a.rows(), a.cols()));
        if (!(inv_err <= 1e-10 * basis.cond_v()))
            throw DecompositionError("F V deviates from I by " + std::to_string(inv_err));
    }
    return basis;
}

inline SpectralBasis jordan_decompose(const Graph& g, const JordanOptions& opts = {}, const Tolerances& tol = {}) {
    const std::size_t limit = opts.backend == Backend::exact ? opts.exact_limit : opts.numeric_limit;
    if (g.size() > limit)
        throw ValidationError("jordan_decompose: N=" + std::to_string(g.size()) + " exceeds the " +
                              std::string(to_string(opts.backend)) + " backend limit of " + std::to_string(limit));
    return jordan_decompose(g.dense(), opts, tol, g.fingerprint());
}

} // namespace graphdsp
