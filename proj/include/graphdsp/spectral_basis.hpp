#pragma once

#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "graphdsp/config.hpp"
#include "graphdsp/exact.hpp"
#include "graphdsp/linalg.hpp"

namespace graphdsp {

/// One Jordan block: chain `chain` of eigenvalue `eigen`, occupying columns
/// [offset, offset + length) of V.
struct JordanBlock {
    std::size_t eigen = 0;
    std::size_t chain = 0;
    std::size_t offset = 0;
    std::size_t length = 0;
};

/// Exact-backend companion data, kept so later constructions can stay exact.
struct ExactJordanData {
    std::vector<GaussRational> eigenvalues;
    exact::Matrix a;
    exact::Matrix v;
    exact::Matrix f;
};

/// Jordan structure of a graph shift: distinct eigenvalues, chain lengths per
/// eigenvalue, generalized eigenvectors V (columns ordered eigenvalue by
/// eigenvalue, chain by chain), and the graph Fourier transform F = V^-1.
class SpectralBasis {
public:
    SpectralBasis() = default;
    SpectralBasis(std::vector<cplx> eigenvalues, std::vector<std::vector<std::size_t>> chains, CMatrix v, CMatrix f,
                  Backend backend, std::uint64_t graph_id, std::optional<ExactJordanData> exact_data = std::nullopt)
        : eigenvalues_(std::move(eigenvalues)), chains_(std::move(chains)), v_(std::move(v)), f_(std::move(f)),
          backend_(backend), graph_id_(graph_id), exact_(std::move(exact_data)) {
        if (eigenvalues_.size() != chains_.size()) throw ValidationError("SpectralBasis: one chain list per eigenvalue");
        std::size_t total = 0;
        for (std::size_t m = 0; m < chains_.size(); ++m) {
            if (chains_[m].empty()) throw ValidationError("SpectralBasis: eigenvalue without chains");
            for (std::size_t d = 0; d < chains_[m].size(); ++d) {
                const std::size_t len = chains_[m][d];
                if (len == 0) throw ValidationError("SpectralBasis: empty Jordan chain");
                blocks_.push_back({m, d, total, len});
                total += len;
            }
        }
        if (total != static_cast<std::size_t>(v_.cols()) || v_.rows() != v_.cols() || f_.rows() != v_.rows() ||
            f_.cols() != v_.cols())
            throw ValidationError("SpectralBasis: chain lengths must sum to N and V, F must be N x N");
        cond_v_ = linalg::cond1(v_, f_);
    }

    std::size_t size() const { return static_cast<std::size_t>(v_.cols()); }
    const std::vector<cplx>& eigenvalues() const { return eigenvalues_; }
    const std::vector<std::vector<std::size_t>>& chains() const { return chains_; }
    const std::vector<JordanBlock>& blocks() const { return blocks_; }
    const CMatrix& v() const { return v_; }
    const CMatrix& f() const { return f_; }
    Backend backend() const { return backend_; }
    double cond_v() const { return cond_v_; }
    std::uint64_t graph_id() const { return graph_id_; }
    const std::optional<ExactJordanData>& exact_data() const { return exact_; }

    /// A_m: algebraic multiplicity.
    std::size_t algebraic_multiplicity(std::size_t m) const {
        return std::accumulate(chains_[m].begin(), chains_[m].end(), std::size_t{0});
    }
    /// D_m: number of chains.
    std::size_t geometric_multiplicity(std::size_t m) const { return chains_[m].size(); }
    /// R_m: longest chain, the exponent of (x - lambda_m) in the minimal polynomial.
    std::size_t index(std::size_t m) const {
        std::size_t r = 0;
        for (auto len : chains_[m]) r = std::max(r, len);
        return r;
    }
    /// N_A = deg m_A.
    std::size_t filter_dimension() const {
        std::size_t d = 0;
        for (std::size_t m = 0; m < chains_.size(); ++m) d += index(m);
        return d;
    }
    /// True when every eigenvalue has a single chain (characteristic = minimal polynomial).
    bool is_nonderogatory() const {
        for (const auto& c : chains_)
            if (c.size() != 1) return false;
        return true;
    }
    bool is_diagonalizable() const {
        for (const auto& c : chains_)
            for (auto len : c)
                if (len != 1) return false;
        return true;
    }

    /// Block-diagonal Jordan normal form J.
    CMatrix jordan_matrix() const {
        const auto n = static_cast<Eigen::Index>(size());
        CMatrix j = CMatrix::Zero(n, n);
        for (const auto& b : blocks_)
            for (std::size_t r = 0; r < b.length; ++r) {
                const auto i = static_cast<Eigen::Index>(b.offset + r);
                j(i, i) = eigenvalues_[b.eigen];
                if (r + 1 < b.length) j(i, i + 1) = 1.0;
            }
        return j;
    }

private:
    std::vector<cplx> eigenvalues_;
    std::vector<std::vector<std::size_t>> chains_;
    std::vector<JordanBlock> blocks_;
    CMatrix v_, f_;
    Backend backend_ = Backend::numeric;
    double cond_v_ = 1.0;
    std::uint64_t graph_id_ = 0;
    std::optional<ExactJordanData> exact_;
};

} // namespace graphdsp
