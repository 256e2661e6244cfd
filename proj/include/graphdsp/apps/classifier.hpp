#pragma once

// Adaptive classification filters prod_p (I + h_p A), trained greedily one stage
// at a time, for label propagation and churn prediction.

#include <algorithm>
#include <cmath>
#include <string>
#include <tuple>
#include <vector>

#include "graphdsp/config.hpp"
#include "graphdsp/graph.hpp"
#include "graphdsp/rng.hpp"

namespace graphdsp {

struct ClassifierFilter {
    std::vector<double> stages;
    /// Training error after each stage (empty for filters not produced by training).
    std::vector<std::size_t> stage_errors;
};

namespace detail {

inline RVector real_values(const GraphSignal& s, const char* what) {
    if (s.values().imag().size() && s.values().imag().cwiseAbs().maxCoeff() != 0.0)
        throw ValidationError(std::string(what) + " must be real-valued");
    return s.values().real();
}

inline RVector shift_real(const Graph& g, const RVector& x) { return g.shift(x.cast<cplx>()).real(); }

// Greedy stage search. `errors(t~)` counts wrong labels; breakpoints solve
// t_n + h (At)_n = threshold over the evaluated nodes.
template <class ErrorFn>
ClassifierFilter train_stages(const Graph& g, RVector t, const std::vector<std::size_t>& eval_nodes, double threshold,
                              std::size_t stages, bool prefer_decided, ErrorFn errors) {
    ClassifierFilter out;
    for (std::size_t p = 0; p < stages; ++p) {
        const RVector at = shift_real(g, t);
        std::vector<double> bps{0.0};
        for (auto n : eval_nodes) {
            if (at(static_cast<Eigen::Index>(n)) == 0.0) continue;
            const double b = (threshold - t(static_cast<Eigen::Index>(n))) / at(static_cast<Eigen::Index>(n));
            if (b > 0.0 && std::isfinite(b)) bps.push_back(b);
        }
        std::sort(bps.begin(), bps.end());
        bps.erase(std::unique(bps.begin(), bps.end()), bps.end());
        std::vector<double> cand = bps;
        for (std::size_t i = 0; i + 1 < bps.size(); ++i) cand.push_back(0.5 * (bps[i] + bps[i + 1]));
        cand.push_back(bps.back() + 1.0);
        std::sort(cand.begin(), cand.end());

        std::tuple<std::size_t, std::size_t, double> best{SIZE_MAX, SIZE_MAX, 0.0};
        for (double h : cand) {
            const RVector tt = t + h * at;
            const std::size_t e = errors(tt);
            const std::size_t undecided =
                prefer_decided ? static_cast<std::size_t>((tt.array() == 0.0).count()) : std::size_t{0};
            const std::tuple<std::size_t, std::size_t, double> key{e, undecided, h};
            if (key < best) best = key;
        }
        const double h = std::get<2>(best);
        out.stages.push_back(h);
        out.stage_errors.push_back(std::get<0>(best));
        t = t + h * at;
    }
    return out;
}

} // namespace detail

/// (I + h_P A) ... (I + h_1 A) s, applied stage by stage.
inline GraphSignal classifier_output(const Graph& g, const ClassifierFilter& cf, const GraphSignal& s) {
    s.check_against(g);
    CVector x = s.values();
    for (double h : cf.stages) x = x + h * g.shift(x);
    return GraphSignal(g, std::move(x));
}

inline double sign_label(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

/// Predicted labels sign(s~_n) in {-1, 0, +1}; 0 means undecided.
inline GraphSignal classify(const Graph& g, const ClassifierFilter& cf, const GraphSignal& s) {
    const CVector out = classifier_output(g, cf, s).values();
    CVector labels(out.size());
    for (Eigen::Index i = 0; i < out.size(); ++i) labels(i) = sign_label(out(i).real());
    return GraphSignal(g, std::move(labels));
}

/// Trains the stages so that sign((I + h A) t) agrees with the known labels.
/// A known label n counts as wrong when t~_n s_n <= 0. Among equal-error
/// candidates, fewer zero outputs over all nodes wins, then the smaller h.
inline ClassifierFilter train_classifier(const Graph& g, const GraphSignal& t, const GraphSignal& s_known,
                                         std::size_t stages = 10) {
    t.check_against(g);
    s_known.check_against(g);
    const RVector tv = detail::real_values(t, "training labels");
    const RVector sv = detail::real_values(s_known, "known labels");
    std::vector<std::size_t> known;
    for (Eigen::Index n = 0; n < sv.size(); ++n) {
        if (sv(n) != 0.0 && sv(n) != 1.0 && sv(n) != -1.0) throw ValidationError("labels must be in {-1, 0, +1}");
        if (tv(n) != 0.0 && tv(n) != 1.0 && tv(n) != -1.0) throw ValidationError("labels must be in {-1, 0, +1}");
        if (tv(n) != 0.0 && tv(n) != sv(n))
            throw ValidationError("training label of node " + std::to_string(n) + " disagrees with its known label");
        if (sv(n) != 0.0) known.push_back(static_cast<std::size_t>(n));
    }
    if (known.empty()) throw ValidationError("train_classifier: no known labels");
    if ((tv.array() != 0.0).count() == 0) throw ValidationError("train_classifier: training labels are all zero");
    auto errors = [&](const RVector& tt) {
        std::size_t e = 0;
        for (auto n : known)
            if (!(tt(static_cast<Eigen::Index>(n)) * sv(static_cast<Eigen::Index>(n)) > 0.0)) ++e;
        return e;
    };
    return detail::train_stages(g, tv, known, 0.0, stages, true, errors);
}

/// Trains the stages for the threshold rule: node n is predicted to churn when
/// s~_n >= threshold; a prediction is wrong when it disagrees with `truth` on a
/// node where `known_mask` is set.
inline ClassifierFilter train_churn(const Graph& g, const GraphSignal& s, const std::vector<int>& truth,
                                    const std::vector<bool>& known_mask, std::size_t stages = 10,
                                    const Tolerances& tol = {}) {
    s.check_against(g);
    const RVector sv = detail::real_values(s, "churn indicators");
    if (truth.size() != g.size() || known_mask.size() != g.size())
        throw ValidationError("train_churn: truth and mask must have one entry per node");
    std::vector<std::size_t> known;
    for (std::size_t n = 0; n < g.size(); ++n) {
        if (sv(static_cast<Eigen::Index>(n)) != 0.0 && sv(static_cast<Eigen::Index>(n)) != 1.0)
            throw ValidationError("churn indicators must be 0 or 1");
        if (known_mask[n]) known.push_back(n);
    }
    if (known.empty()) throw ValidationError("train_churn: no known outcomes");
    const double th = tol.churn_threshold;
    auto errors = [&](const RVector& tt) {
        std::size_t e = 0;
        for (auto n : known)
            if ((tt(static_cast<Eigen::Index>(n)) >= th) != (truth[n] != 0)) ++e;
        return e;
    };
    return detail::train_stages(g, sv, known, th, stages, false, errors);
}

/// True when every row of A sums to 1 or 0 (within 1e-12).
inline bool is_row_normalized(const Graph& g) {
    std::vector<cplx> rows(g.size(), 0.0);
    for (const auto& e : g.edges()) rows[e.dst] += e.weight;
    return std::all_of(rows.begin(), rows.end(), [](cplx r) {
        return std::abs(r) <= 1e-12 || std::abs(r - cplx(1.0)) <= 1e-12;
    });
}

struct ChurnPrediction {
    GraphSignal scores;
    std::vector<bool> churn;
    bool graph_normalized = true;
};

inline ChurnPrediction predict_churn(const Graph& g, const ClassifierFilter& cf, const GraphSignal& s,
                                     const Tolerances& tol = {}) {
    const RVector sv = detail::real_values(s, "churn indicators");
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) != 0.0 && sv(i) != 1.0) throw ValidationError("churn indicators must be 0 or 1");
    ChurnPrediction out{classifier_output(g, cf, s), {}, is_row_normalized(g)};
    for (std::size_t n = 0; n < g.size(); ++n) out.churn.push_back(out.scores[n].real() >= tol.churn_threshold);
    return out;
}

enum class SeedStrategy { random, most_links };

/// Reveals the labels of ceil(fraction * N) nodes; the rest become 0.
inline GraphSignal select_seeds(const Graph& g, const std::vector<int>& truth, double fraction, SeedStrategy strategy,
                                Rng& rng) {
    if (truth.size() != g.size()) throw ValidationError("select_seeds: one label per node is required");
    if (!(fraction > 0.0 && fraction <= 1.0)) throw ValidationError("select_seeds: fraction must be in (0, 1]");
    const std::size_t k = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(g.size()) - 1e-9));
    std::vector<std::size_t> order(g.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    if (strategy == SeedStrategy::random) {
        rng.shuffle(order);
    } else {
        std::vector<std::size_t> degree(g.size(), 0);
        for (const auto& e : g.edges()) {
            ++degree[e.src];
            ++degree[e.dst];
        }
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return degree[a] > degree[b]; });
    }
    CVector s = CVector::Zero(static_cast<Eigen::Index>(g.size()));
    for (std::size_t i = 0; i < k; ++i) s(static_cast<Eigen::Index>(order[i])) = static_cast<double>(truth[order[i]]);
    return GraphSignal(g, std::move(s));
}

/// Training labels t: for each class, a random ceil(fraction * count) subset of the known labels.
inline GraphSignal split_training_labels(const GraphSignal& s_known, Rng& rng, double fraction = 0.5) {
    const RVector sv = detail::real_values(s_known, "known labels");
    CVector t = CVector::Zero(sv.size());
    for (double cls : {1.0, -1.0}) {
        std::vector<Eigen::Index> members;
        for (Eigen::Index n = 0; n < sv.size(); ++n)
            if (sv(n) == cls) members.push_back(n);
        rng.shuffle(members);
        const auto take = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(members.size()) - 1e-9));
        for (std::size_t i = 0; i < take && i < members.size(); ++i) t(members[i]) = cls;
    }
    return GraphSignal(std::move(t), s_known.graph_id());
}

} // namespace graphdsp
