#pragma once

// Graph Fourier transform, its inverse, frequency response, and spectral-domain filtering.

#include <cstdint>
#include <string>
#include <utility>

#include "graphdsp/config.hpp"
#include "graphdsp/graph.hpp"
#include "graphdsp/jordan.hpp"
#include "graphdsp/linalg.hpp"
#include "graphdsp/poly_algebra.hpp"
#include "graphdsp/polynomial.hpp"
#include "graphdsp/spectral_basis.hpp"

namespace graphdsp {

/// Expansion coefficients of a signal in the columns of V.
struct Spectrum {
    CVector coeffs;
    std::uint64_t basis_id = 0;

    std::size_t size() const { return static_cast<std::size_t>(coeffs.size()); }
};

namespace detail {
inline void check_signal_for_basis(const SpectralBasis& basis, std::size_t len, std::uint64_t id) {
    if (len != basis.size())
        throw ValidationError("length " + std::to_string(len) + " does not match basis size " +
                              std::to_string(basis.size()));
    if (id != 0 && basis.graph_id() != 0 && id != basis.graph_id())
        throw ValidationError("signal and spectral basis belong to different graphs");
}
} // namespace detail

/// s_hat = F s.
inline Spectrum gft(const SpectralBasis& basis, const GraphSignal& s) {
    detail::check_signal_for_basis(basis, s.size(), s.graph_id());
    return {basis.f() * s.values(), basis.graph_id()};
}

/// s = V s_hat.
inline GraphSignal igft(const SpectralBasis& basis, const Spectrum& spec) {
    detail::check_signal_for_basis(basis, spec.size(), spec.basis_id);
    return GraphSignal(basis.v() * spec.coeffs, basis.graph_id());
}

/// h(J): block-diagonal, one upper-triangular Toeplitz block per Jordan chain.
inline CMatrix frequency_response(const Polynomial& h, const SpectralBasis& basis) {
    const auto n = static_cast<Eigen::Index>(basis.size());
    CMatrix out = CMatrix::Zero(n, n);
    for (const auto& b : basis.blocks()) {
        const auto off = static_cast<Eigen::Index>(b.offset);
        const auto len = static_cast<Eigen::Index>(b.length);
        out.block(off, off, len, len) = eval_on_jordan_block(h, basis.eigenvalues()[b.eigen], b.length);
    }
    return out;
}

/// V h(J) F s, computed block by block without forming h(J) densely.
inline GraphSignal spectral_filter(const SpectralBasis& basis, const Polynomial& h, const GraphSignal& s) {
    Spectrum spec = gft(basis, s);
    CVector out(spec.coeffs.size());
    for (const auto& b : basis.blocks()) {
        const auto off = static_cast<Eigen::Index>(b.offset);
        const auto len = static_cast<Eigen::Index>(b.length);
        out.segment(off, len) = eval_on_jordan_block(h, basis.eigenvalues()[b.eigen], b.length) * spec.coeffs.segment(off, len);
    }
    spec.coeffs = std::move(out);
    return igft(basis, spec);
}

} // namespace graphdsp
