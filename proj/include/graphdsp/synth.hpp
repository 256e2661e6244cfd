#pragma once

// Synthetic datasets: smooth fields on kNN graphs, planted two-block graphs, and
// community-structured call logs with planted churn.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "graphdsp/config.hpp"
#include "graphdsp/graph.hpp"
#include "graphdsp/jordan.hpp"
#include "graphdsp/rng.hpp"

namespace graphdsp {

struct SmoothFieldParams {
    std::size_t nodes = 150;
    std::size_t k = 11;
    std::size_t order = 4;      // number of leading eigenvectors combined
    double noise = 0.1;         // noise std as a fraction of ||s|| / sqrt(N)
    std::size_t snapshots = 1;  // independent signals on the same graph
};

struct SmoothField {
    std::vector<Point> points;
    Graph graph;
    std::vector<RVector> signals;
};

/// Points uniform in a square of side sqrt(N / 11); each snapshot is a normal
/// random combination of the `order` eigenvectors with the largest eigenvalues of
/// the kNN graph, plus white noise.
inline SmoothField synth_smooth_field(const SmoothFieldParams& p, Rng& rng) {
    if (p.order < 1 || p.order > p.nodes) throw ValidationError("smooth-field: order must be in [1, N]");
    const double side = std::sqrt(static_cast<double>(p.nodes) / 11.0);
    SmoothField out;
    for (std::size_t i = 0; i < p.nodes; ++i) out.points.push_back({rng.uniform(0.0, side), rng.uniform(0.0, side)});
    out.graph = knn_similarity_graph(out.points, p.k);
    const SpectralBasis basis = jordan_decompose(out.graph);
    const auto n = static_cast<Eigen::Index>(p.nodes);
    for (std::size_t t = 0; t < p.snapshots; ++t) {
        RVector s = RVector::Zero(n);
        for (std::size_t j = 0; j < p.order; ++j)
            s += rng.normal() * basis.v().col(n - 1 - static_cast<Eigen::Index>(j)).real();
        const double sigma = p.noise * s.norm() / std::sqrt(static_cast<double>(n));
        for (Eigen::Index i = 0; i < n; ++i) s(i) += sigma * rng.normal();
        out.signals.push_back(std::move(s));
    }
    return out;
}

struct TwoBlockParams {
    std::size_t block_size = 50;
    double p_in = 0.5;
    double p_out = 0.01;
};

struct TwoBlock {
    Graph graph;
    std::vector<int> labels;  // +1 for the first block, -1 for the second
};

/// Directed planted partition: each ordered pair (m, n), m != n, is an edge of
/// weight 1 with probability p_in inside a block and p_out across.
inline TwoBlock synth_two_block(const TwoBlockParams& p, Rng& rng) {
    const std::size_t n = 2 * p.block_size;
    TwoBlock out;
    for (std::size_t i = 0; i < n; ++i) out.labels.push_back(i < p.block_size ? 1 : -1);
    std::vector<Edge> edges;
    for (std::size_t m = 0; m < n; ++m)
        for (std::size_t k = 0; k < n; ++k) {
            if (m == k) continue;
            const double prob = out.labels[m] == out.labels[k] ? p.p_in : p.p_out;
            if (rng.bernoulli(prob)) edges.push_back({m, k, 1.0});
        }
    out.graph = Graph(n, std::move(edges));
    return out;
}

struct CallLogParams {
    std::size_t communities = 10;
    std::size_t community_size = 30;
    std::size_t churn_communities = 2;
    double p_in = 0.3;
    double p_out = 0.01;
    double mean_duration = 10.0;
    double churned_hot = 0.3;   // already churned, churn communities
    double future_hot = 0.5;    // will churn, churn communities
    double churned_cold = 0.02;
    double future_cold = 0.02;
};

struct CallLog {
    RMatrix durations;
    std::vector<int> churned;  // already left the provider (observable)
    std::vector<int> truth;    // churned or will churn
};

inline CallLog synth_call_log(const CallLogParams& p, Rng& rng) {
    const std::size_t n = p.communities * p.community_size;
    CallLog out;
    out.durations = RMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    auto community = [&](std::size_t i) { return i / p.community_size; };
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            const double prob = community(i) == community(j) ? p.p_in : p.p_out;
            if (rng.bernoulli(prob))
                out.durations(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rng.exponential(p.mean_duration);
        }
    for (std::size_t i = 0; i < n; ++i) {
        const bool hot = community(i) < p.churn_communities;
        const int churned = rng.bernoulli(hot ? p.churned_hot : p.churned_cold) ? 1 : 0;
        const int future = rng.bernoulli(hot ? p.future_hot : p.future_cold) ? 1 : 0;
        out.churned.push_back(churned);
        out.truth.push_back(churned | future);
    }
    return out;
}

} // namespace graphdsp
