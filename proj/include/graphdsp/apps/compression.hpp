#pragma once

// Spectral compression: keep the C largest-magnitude GFT coefficients.

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

#include "graphdsp/config.hpp"
#include "graphdsp/graph.hpp"
#include "graphdsp/spectral.hpp"
#include "graphdsp/spectral_basis.hpp"

namespace graphdsp {

/// Indices of the `c` largest |coeffs|, magnitude ties to the lower index.
inline std::vector<std::size_t> largest_coefficients(const CVector& coeffs, std::size_t c) {
    std::vector<std::size_t> idx(static_cast<std::size_t>(coeffs.size()));
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return std::abs(coeffs(static_cast<Eigen::Index>(a))) > std::abs(coeffs(static_cast<Eigen::Index>(b)));
    });
    idx.resize(std::min(c, idx.size()));
    std::sort(idx.begin(), idx.end());
    return idx;
}

/// Zeroes all but the `c` largest-magnitude entries.
inline Spectrum truncate_spectrum(const Spectrum& spec, std::size_t c) {
    if (c < 1 || c > spec.size())
        throw ValidationError("compress: C must be in [1, " + std::to_string(spec.size()) + "], got " + std::to_string(c));
    Spectrum out{CVector::Zero(spec.coeffs.size()), spec.basis_id};
    for (auto i : largest_coefficients(spec.coeffs, c))
        out.coeffs(static_cast<Eigen::Index>(i)) = spec.coeffs(static_cast<Eigen::Index>(i));
    return out;
}

/// True when the basis is well enough conditioned for coefficient magnitudes to be meaningful.
inline bool suited_for_compression(const SpectralBasis& basis) { return basis.cond_v() <= 1e3; }

inline Spectrum compress(const SpectralBasis& basis, const GraphSignal& s, std::size_t c) {
    return truncate_spectrum(gft(basis, s), c);
}

inline GraphSignal decompress(const SpectralBasis& basis, const Spectrum& spec) { return igft(basis, spec); }

struct DominantVector {
    std::size_t index = 0;
    std::vector<std::size_t> histogram;
};

/// For each signal, the column of V carrying the largest |s_hat|; returns the most
/// frequent one (lowest index on ties) and the full histogram.
inline DominantVector dominant_basis_vector(const SpectralBasis& basis, const std::vector<GraphSignal>& signals) {
    if (signals.empty()) throw ValidationError("dominant_basis_vector: at least one signal is required");
    DominantVector out;
    out.histogram.assign(basis.size(), 0);
    for (const auto& s : signals) {
        const CVector spec = gft(basis, s).coeffs;
        Eigen::Index best = 0;
        for (Eigen::Index i = 1; i < spec.size(); ++i)
            if (std::abs(spec(i)) > std::abs(spec(best))) best = i;
        ++out.histogram[static_cast<std::size_t>(best)];
    }
    out.index = static_cast<std::size_t>(
        std::max_element(out.histogram.begin(), out.histogram.end()) - out.histogram.begin());
    return out;
}

} // namespace graphdsp
