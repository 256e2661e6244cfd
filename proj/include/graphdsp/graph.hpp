#pragma once

// Graphs, graph signals, the graph shift, and the two graph constructions used by
// the applications (kNN similarity graphs and normalized call graphs).
//
// Orientation: A(n, m) is the weight of the directed edge FROM node m TO node n,
// so the shifted signal is (A s)_n = sum_m A(n, m) s_m. An edge (src, dst, w)
// therefore sets A(dst, src) = w.

#include <Eigen/Sparse>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "graphdsp/config.hpp"
#include "graphdsp/linalg.hpp"

namespace graphdsp {

struct Edge {
    std::size_t src = 0;
    std::size_t dst = 0;
    cplx weight{1.0, 0.0};

    friend bool operator==(const Edge&, const Edge&) = default;
};

struct GraphOptions {
    /// Graphs with more nodes than this are stored sparse.
    std::size_t dense_threshold = 2048;
};

class Graph {
public:
    using SparseMatrix = Eigen::SparseMatrix<cplx, Eigen::RowMajor>;

    Graph() = default;

    /// Builds a graph from an edge list. Edges are validated and kept in
    /// canonical (src, dst) order; zero weights are dropped.
    Graph(std::size_t n_nodes, std::vector<Edge> edges, GraphOptions opts = {}) : n_(n_nodes) {
        if (n_nodes == 0) throw ValidationError("graph must have at least one node");
        for (const auto& e : edges) {
            if (e.src >= n_nodes || e.dst >= n_nodes)
                throw ValidationError("edge (" + std::to_string(e.src) + "," + std::to_string(e.dst) +
                                      ") out of range for N=" + std::to_string(n_nodes));
            if (!std::isfinite(e.weight.real()) || !std::isfinite(e.weight.imag()))
                throw ValidationError("edge (" + std::to_string(e.src) + "," + std::to_string(e.dst) +
                                      ") has a non-finite weight");
        }
        std::sort(edges.begin(), edges.end(),
                  [](const Edge& a, const Edge& b) { return std::tie(a.src, a.dst) < std::tie(b.src, b.dst); });
        for (std::size_t i = 1; i < edges.size(); ++i)
            if (edges[i].src == edges[i - 1].src && edges[i].dst == edges[i - 1].dst)
                throw ValidationError("duplicate edge (" + std::to_string(edges[i].src) + "," +
                                      std::to_string(edges[i].dst) + ")");
        std::erase_if(edges, [](const Edge& e) { return e.weight == cplx(0.0); });
        edges_ = std::move(edges);
        build_storage(opts);
    }

    /// Takes A directly (A(n, m) = weight of edge m -> n).
    static Graph from_adjacency(const CMatrix& a, GraphOptions opts = {}) {
        if (a.rows() != a.cols()) throw ValidationError("adjacency matrix must be square");
        std::vector<Edge> edges;
        for (Eigen::Index m = 0; m < a.cols(); ++m)
            for (Eigen::Index n = 0; n < a.rows(); ++n)
                if (a(n, m) != cplx(0.0))
                    edges.push_back({static_cast<std::size_t>(m), static_cast<std::size_t>(n), a(n, m)});
        return Graph(static_cast<std::size_t>(a.rows()), std::move(edges), opts);
    }

    std::size_t size() const { return n_; }
    bool is_dense() const { return !sparse_; }
    const std::vector<Edge>& edges() const { return edges_; }
    std::uint64_t fingerprint() const { return fingerprint_; }

    const std::vector<std::string>& node_labels() const { return labels_; }
    void set_node_labels(std::vector<std::string> labels) {
        if (!labels.empty() && labels.size() != n_) throw ValidationError("node label count must equal N");
        labels_ = std::move(labels);
    }

    cplx weight(std::size_t n, std::size_t m) const {
        if (!sparse_) return dense_(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
        return sparse_->coeff(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
    }

    /// { m : A(n, m) != 0 }, ascending.
    std::vector<std::size_t> neighborhood(std::size_t n) const {
        std::vector<std::size_t> out;
        if (!sparse_) {
            for (std::size_t m = 0; m < n_; ++m)
                if (weight(n, m) != cplx(0.0)) out.push_back(m);
        } else {
            for (SparseMatrix::InnerIterator it(*sparse_, static_cast<Eigen::Index>(n)); it; ++it)
                if (it.value() != cplx(0.0)) out.push_back(static_cast<std::size_t>(it.col()));
        }
        return out;
    }

    /// A * x.
    CVector shift(const CVector& x) const {
        if (x.size() != static_cast<Eigen::Index>(n_))
            throw ValidationError("signal length " + std::to_string(x.size()) + " does not match N=" +
                                  std::to_string(n_));
        if (!sparse_) return dense_ * x;
        return *sparse_ * x;
    }

    CMatrix dense() const {
        if (!sparse_) return dense_;
        return CMatrix(*sparse_);
    }

    /// ||A||_1 (max column sum).
    double norm1() const {
        std::vector<double> col(n_, 0.0);
        for (const auto& e : edges_) col[e.src] += std::abs(e.weight);
        return col.empty() ? 0.0 : *std::max_element(col.begin(), col.end());
    }

    bool is_real() const {
        return std::all_of(edges_.begin(), edges_.end(), [](const Edge& e) { return e.weight.imag() == 0.0; });
    }

private:
    void build_storage(const GraphOptions& opts) {
        if (n_ <= opts.dense_threshold) {
            dense_ = CMatrix::Zero(static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(n_));
            for (const auto& e : edges_) dense_(static_cast<Eigen::Index>(e.dst), static_cast<Eigen::Index>(e.src)) = e.weight;
        } else {
            std::vector<Eigen::Triplet<cplx>> trip;
            trip.reserve(edges_.size());
            for (const auto& e : edges_)
                trip.emplace_back(static_cast<Eigen::Index>(e.dst), static_cast<Eigen::Index>(e.src), e.weight);
            sparse_.emplace(static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(n_));
            sparse_->setFromTriplets(trip.begin(), trip.end());
        }
        fingerprint_ = compute_fingerprint();
    }

    // FNV-1a over N and the canonical edge list (src, dst, bit patterns of re/im).
    std::uint64_t compute_fingerprint() const {
        std::uint64_t h = 1469598103934665603ULL;
        auto mix = [&h](std::uint64_t v) {
            for (int i = 0; i < 8; ++i) {
                h ^= (v >> (8 * i)) & 0xffU;
                h *= 1099511628211ULL;
            }
        };
        mix(n_);
        for (const auto& e : edges_) {
            mix(e.src);
            mix(e.dst);
            mix(std::bit_cast<std::uint64_t>(e.weight.real() + 0.0));
            mix(std::bit_cast<std::uint64_t>(e.weight.imag() + 0.0));
        }
        return h;
    }

    std::size_t n_ = 0;
    std::vector<Edge> edges_;
    CMatrix dense_;
    std::optional<SparseMatrix> sparse_;
    std::vector<std::string> labels_;
    std::uint64_t fingerprint_ = 0;
};

/// Signal indexed by the nodes of a graph. `graph_id() == 0` means unbound.
class GraphSignal {
public:
    GraphSignal() = default;
    explicit GraphSignal(CVector values, std::uint64_t graph_id = 0) : values_(std::move(values)), graph_id_(graph_id) {
        if (!linalg::all_finite(values_)) throw ValidationError("graph signal has non-finite entries");
    }
    GraphSignal(const Graph& g, CVector values) : GraphSignal(std::move(values), g.fingerprint()) {
        check_against(g);
    }

    std::size_t size() const { return static_cast<std::size_t>(values_.size()); }
    const CVector& values() const { return values_; }
    cplx operator[](std::size_t i) const { return values_(static_cast<Eigen::Index>(i)); }
    std::uint64_t graph_id() const { return graph_id_; }

    void check_against(const Graph& g) const {
        if (size() != g.size())
            throw ValidationError("signal length " + std::to_string(size()) + " does not match graph size " +
                                  std::to_string(g.size()));
        if (graph_id_ != 0 && graph_id_ != g.fingerprint())
            throw ValidationError("signal is bound to a different graph");
    }

private:
    CVector values_;
    std::uint64_t graph_id_ = 0;
};

inline Graph build_graph(std::size_t n_nodes, std::vector<Edge> edges, GraphOptions opts = {}) {
    return Graph(n_nodes, std::move(edges), opts);
}

/// (A s)_n = sum over the neighborhood of n of A(n, m) s_m.
inline GraphSignal graph_shift(const Graph& g, const GraphSignal& s) {
    s.check_against(g);
    return GraphSignal(g, g.shift(s.values()));
}

/// Graph with adjacency A^T (every edge reversed).
inline Graph transpose(const Graph& g) {
    std::vector<Edge> edges;
    edges.reserve(g.edges().size());
    for (const auto& e : g.edges()) edges.push_back({e.dst, e.src, e.weight});
    return Graph(g.size(), std::move(edges));
}

/// Directed cycle: A(n, m) = 1 iff n - m = 1 mod N.
inline Graph cycle_graph(std::size_t n) {
    std::vector<Edge> edges;
    for (std::size_t m = 0; m < n; ++m) edges.push_back({m, (m + 1) % n, 1.0});
    return Graph(n, std::move(edges));
}

using Point = std::vector<double>;

inline double euclidean_distance(const Point& a, const Point& b) {
    if (a.size() != b.size()) throw ValidationError("points have different dimensions");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

/// K-nearest-neighbor similarity graph. Each node links to its K nearest points
/// (distance ties go to the lower index), the relation is symmetrized by union, and
///   A(n,m) = exp(-d_nm^2) / sqrt( sum_{k in N(n)} exp(-d_nk^2) * sum_{l in N(m)} exp(-d_ml^2) )
/// with neighborhoods taken after symmetrization. Weights are computed in the log
/// domain so that large distances do not underflow the normalizers.
template <class Distance = decltype(&euclidean_distance)>
Graph knn_similarity_graph(std::span<const Point> points, std::size_t k, Distance dist = &euclidean_distance) {
    const std::size_t n = points.size();
    if (k == 0) throw ValidationError("knn: K must be positive");
    if (k >= n) throw ValidationError("knn: K=" + std::to_string(k) + " requires at least K+1 points, got " +
                                      std::to_string(n));
    std::vector<double> d(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = dist(points[i], points[j]);
            if (!std::isfinite(v) || v < 0.0) throw ValidationError("knn: distances must be finite and nonnegative");
            d[i * n + j] = d[j * n + i] = v;
        }

    std::vector<std::vector<char>> linked(n, std::vector<char>(n, 0));
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) {
        order.resize(n);
        std::iota(order.begin(), order.end(), 0);
        std::erase(order, i);
        std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                          [&](std::size_t a, std::size_t b) {
                              return d[i * n + a] < d[i * n + b] || (d[i * n + a] == d[i * n + b] && a < b);
                          });
        for (std::size_t j = 0; j < k; ++j) {
            linked[i][order[j]] = 1;
            linked[order[j]][i] = 1;
        }
    }

    // log of sum_{k in N(i)} exp(-d_ik^2)
    std::vector<double> log_norm(n);
    for (std::size_t i = 0; i < n; ++i) {
        double lo = INFINITY;
        for (std::size_t j = 0; j < n; ++j)
            if (linked[i][j]) lo = std::min(lo, d[i * n + j] * d[i * n + j]);
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            if (linked[i][j]) acc += std::exp(-(d[i * n + j] * d[i * n + j] - lo));
        log_norm[i] = std::log(acc) - lo;
    }

    std::vector<Edge> edges;
    for (std::size_t m = 0; m < n; ++m)
        for (std::size_t i = 0; i < n; ++i) {
            if (!linked[i][m]) continue;
            const double dd = d[i * n + m];
            const double w = std::exp(-dd * dd - 0.5 * (log_norm[i] + log_norm[m]));
            edges.push_back({m, i, w});
        }
    return Graph(n, std::move(edges));
}

/// Row-normalized call graph A(n,m) = T(n,m) / sum_k T(n,k); all-zero rows stay zero.
inline Graph normalize_call_graph(const RMatrix& durations) {
    if (durations.rows() != durations.cols()) throw ValidationError("call-duration matrix must be square");
    const Eigen::Index n = durations.rows();
    std::vector<Edge> edges;
    for (Eigen::Index i = 0; i < n; ++i) {
        double total = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            const double t = durations(i, j);
            if (!std::isfinite(t)) throw ValidationError("call durations must be finite");
            if (t < 0.0)
                throw ValidationError("negative call duration at (" + std::to_string(i) + "," + std::to_string(j) + ")");
            total += t;
        }
        if (total == 0.0) continue;
        for (Eigen::Index j = 0; j < n; ++j)
            if (durations(i, j) != 0.0)
                edges.push_back({static_cast<std::size_t>(j), static_cast<std::size_t>(i), durations(i, j) / total});
    }
    return Graph(static_cast<std::size_t>(n), std::move(edges));
}

} // namespace graphdsp
