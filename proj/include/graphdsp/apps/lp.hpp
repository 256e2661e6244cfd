#pragma once

// Linear-prediction coding of graph signals: fit h with h_0 = 0 so that h(A)s
// predicts s, quantize the residual r = (I - h(A))s, and decode through the
// inverse of the synthesis filter 1 - h.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "graphdsp/config.hpp"
#include "graphdsp/filtering.hpp"
#include "graphdsp/graph.hpp"
#include "graphdsp/linalg.hpp"
#include "graphdsp/poly_algebra.hpp"
#include "graphdsp/spectral_basis.hpp"

namespace graphdsp {

struct QuantHeader {
    double min = 0.0;
    double max = 0.0;
    unsigned bits = 1;
};

struct LPCode {
    GraphFilter taps;
    std::vector<std::uint32_t> codes;
    QuantHeader header;
    std::uint64_t fingerprint = 0;
};

/// Least-squares taps (0, h_1, ..., h_{L-1}) minimizing ||s - sum_l h_l A^l s||.
inline GraphFilter lp_fit(const Graph& g, const GraphSignal& s, std::size_t taps, const Tolerances& tol = {}) {
    s.check_against(g);
    if (taps < 2 || taps > 10) throw ValidationError("lp_fit: tap count L must be in [2, 10], got " + std::to_string(taps));
    if (!g.is_real() || s.values().imag().cwiseAbs().maxCoeff() != 0.0)
        throw ValidationError("lp_fit: graph and signal must be real-valued");
    const auto n = static_cast<Eigen::Index>(g.size());
    CMatrix b(n, static_cast<Eigen::Index>(taps - 1));
    CVector col = s.values();
    for (std::size_t l = 1; l < taps; ++l) {
        col = g.shift(col);
        b.col(static_cast<Eigen::Index>(l - 1)) = col;
    }
    const CVector h = linalg::lstsq_min_norm(b, s.values(), tol.rank);
    std::vector<cplx> c(taps, 0.0);
    for (std::size_t l = 1; l < taps; ++l) c[l] = cplx(h(static_cast<Eigen::Index>(l - 1)).real(), 0.0);
    return {Polynomial(std::move(c), 0.0), g.fingerprint()};
}

/// (I - h(A)) s.
inline GraphSignal lp_residual(const Graph& g, const GraphFilter& f, const GraphSignal& s) {
    return GraphSignal(g, s.values() - apply_filter(g, f, s).values());
}

/// Uniform mid-rise quantizer over [min, max] with 2^bits cells.
inline std::vector<std::uint32_t> quantize(const RVector& r, const QuantHeader& q) {
    const std::uint32_t levels = 1u << q.bits;
    std::vector<std::uint32_t> codes(static_cast<std::size_t>(r.size()), 0);
    if (!(q.max > q.min)) return codes;
    const double step = (q.max - q.min) / levels;
    for (Eigen::Index i = 0; i < r.size(); ++i) {
        const double cell = std::floor((r(i) - q.min) / step);
        codes[static_cast<std::size_t>(i)] = static_cast<std::uint32_t>(std::clamp(cell, 0.0, double(levels - 1)));
    }
    return codes;
}

inline RVector dequantize(const std::vector<std::uint32_t>& codes, const QuantHeader& q) {
    RVector out(static_cast<Eigen::Index>(codes.size()));
    if (!(q.max > q.min)) {
        out.setConstant(q.min);
        return out;
    }
    const double step = (q.max - q.min) / (1u << q.bits);
    for (std::size_t i = 0; i < codes.size(); ++i)
        out(static_cast<Eigen::Index>(i)) = q.min + (static_cast<double>(codes[i]) + 0.5) * step;
    return out;
}

inline LPCode lp_encode(const Graph& g, const GraphFilter& f, const GraphSignal& s, unsigned bits) {
    if (bits < 1 || bits > 16) throw ValidationError("lp_encode: bits must be in [1, 16], got " + std::to_string(bits));
    f.check_against(g);
    const CVector r = lp_residual(g, f, s).values();
    if (r.imag().cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, r.cwiseAbs().maxCoeff()))
        throw ValidationError("lp_encode: residual is not real-valued");
    const RVector re = r.real();
    QuantHeader q{re.minCoeff(), re.maxCoeff(), bits};
    return {f, quantize(re, q), q, g.fingerprint()};
}

/// Dequantizes the residual and applies the inverse of 1 - h(A), evaluated as
/// V (1 - h)(J)^-1 F, which equals g(A) for the interpolating inverse g.
inline GraphSignal lp_decode(const Graph& g, const GraphFilter& f, const LPCode& code, const SpectralBasis& basis,
                             const Tolerances& tol = {}) {
    if (code.fingerprint != 0 && code.fingerprint != g.fingerprint())
        throw ValidationError("lp_decode: code was produced on a different graph");
    if (code.codes.size() != g.size()) throw ValidationError("lp_decode: code length does not match the graph");
    if (basis.size() != g.size()) throw ValidationError("lp_decode: basis does not match the graph");
    f.check_against(g);
    const Polynomial synth = Polynomial::constant(1.0) - f.taps;
    const double qnorm = synth.norm();
    for (const auto& lambda : basis.eigenvalues())
        if (!(std::abs(synth(lambda)) > tol.inverse * qnorm))
            throw NonInvertibleError("lp_decode: synthesis filter 1 - h vanishes at eigenvalue " + linalg::format(lambda),
                                     lambda);
    const CVector rhat = dequantize(code.codes, code.header).cast<cplx>();
    CVector spec = basis.f() * rhat;
    for (const auto& b : basis.blocks()) {
        const auto off = static_cast<Eigen::Index>(b.offset);
        const auto len = static_cast<Eigen::Index>(b.length);
        const CMatrix blk = eval_on_jordan_block(synth, basis.eigenvalues()[b.eigen], b.length);
        spec.segment(off, len) = blk.triangularView<Eigen::Upper>().solve(spec.segment(off, len));
    }
    CVector s = basis.v() * spec;
    if (g.is_real()) s = s.real().cast<cplx>();
    return GraphSignal(g, std::move(s));
}

} // namespace graphdsp
