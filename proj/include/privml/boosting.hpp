#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "privml/errors.hpp"
#include "privml/types.hpp"

namespace privml {

enum class BoostObjective { logistic, softprob };

struct GBTParams {
    std::size_t n_rounds = 100;
    double learning_rate = 0.1;
    std::size_t max_depth = 4;
};

struct XGBParams {
    std::size_t n_rounds = 1000;
    double learning_rate = 0.1;
    double l2_lambda = 1.0;
    std::size_t max_depth = 6;
    double min_child_weight = 1.0;  // minimum hessian sum per child
};

struct BoostedTreeNode {
    bool is_leaf = true;
    std::size_t feature = 0;
    double threshold = 0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    double value = 0;   // leaf weight
    double g_sum = 0;   // gradient sum over the leaf's training records
    double h_sum = 0;   // hessian sum, same records
};

struct BoostedTree {
    std::vector<BoostedTreeNode> nodes;

    double predict(const FeatureArray& f) const {
        std::size_t i = 0;
        while (!nodes[i].is_leaf) {
            i = static_cast<std::size_t>(f[nodes[i].feature] <= nodes[i].threshold
                                             ? nodes[i].left
                                             : nodes[i].right);
        }
        return nodes[i].value;
    }
};

namespace detail {

inline double sigmoid(double z) {
    if (z >= 0) {
        double e = std::exp(-z);
        return 1.0 / (1.0 + e);
    }
    double e = std::exp(z);
    return e / (1.0 + e);
}

/// Builds one regression tree for boosting. Split structure uses
/// (g, h_split) with the regularized second-order gain; leaf weights use
/// (g, h_leaf) as -G/(H + lambda). A first-order booster passes
/// h_split = 1 per record, which reduces the gain to least squares on the
/// residuals while the leaves still take the Newton step.
struct BoostTreeBuilder {
    const std::vector<FeatureArray>& x;
    const std::vector<double>& g;
    const std::vector<double>& h_split;
    const std::vector<double>& h_leaf;
    double lambda = 0;
    double split_lambda = 0;
    std::size_t max_depth = 4;
    double min_child_weight = 1.0;
    double max_abs_leaf = 0;  // 0 disables clamping

    std::vector<BoostedTreeNode> nodes;

    struct Candidate {
        std::size_t feature;
        double threshold;
        double gain;
    };

    static double leaf_objective_term(double g_sum, double h_sum, double lambda) {
        return g_sum * g_sum / (h_sum + lambda);
    }

    std::optional<Candidate> best_split(const std::vector<std::size_t>& idx, double g_total,
                                        double h_total) const {
        std::optional<Candidate> best;
        double parent_term = leaf_objective_term(g_total, h_total, split_lambda);
        std::vector<std::pair<double, std::size_t>> vals(idx.size());
        for (std::size_t feature = 0; feature < kNumFeatures; ++feature) {
            for (std::size_t k = 0; k < idx.size(); ++k)
                vals[k] = {x[idx[k]][feature], idx[k]};
            std::sort(vals.begin(), vals.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });
            double gl = 0, hl = 0;
            std::size_t k = 0;
            while (k < vals.size()) {
                double v = vals[k].first;
                while (k < vals.size() && vals[k].first == v) {
                    gl += g[vals[k].second];
                    hl += h_split[vals[k].second];
                    ++k;
                }
                if (k == vals.size()) break;
                double gr = g_total - gl;
                double hr = h_total - hl;
                if (hl < min_child_weight || hr < min_child_weight) continue;
                double gain = 0.5 * (leaf_objective_term(gl, hl, split_lambda) +
                                     leaf_objective_term(gr, hr, split_lambda) - parent_term);
                if (gain > 1e-12 && (!best || gain > best->gain)) {
                    best = Candidate{feature, v + (vals[k].first - v) / 2.0, gain};
                }
            }
        }
        return best;
    }

    std::int32_t build(const std::vector<std::size_t>& idx, std::size_t depth) {
        double g_split_total = 0, h_split_total = 0;
        double g_leaf_total = 0, h_leaf_total = 0;
        for (std::size_t i : idx) {
            g_split_total += g[i];
            h_split_total += h_split[i];
            g_leaf_total += g[i];
            h_leaf_total += h_leaf[i];
        }

        std::int32_t node_id = static_cast<std::int32_t>(nodes.size());
        nodes.push_back(BoostedTreeNode{});
        {
            BoostedTreeNode& node = nodes.back();
            node.g_sum = g_leaf_total;
            node.h_sum = h_leaf_total;
            double denom = h_leaf_total + lambda;
            node.value = denom > 1e-12 ? -g_leaf_total / denom : 0.0;
            if (max_abs_leaf > 0) node.value = std::clamp(node.value, -max_abs_leaf, max_abs_leaf);
        }

        if (depth >= max_depth || idx.size() < 2) return node_id;
        auto split = best_split(idx, g_split_total, h_split_total);
        if (!split) return node_id;

        std::vector<std::size_t> left_idx, right_idx;
        for (std::size_t i : idx)
            (x[i][split->feature] <= split->threshold ? left_idx : right_idx).push_back(i);
        if (left_idx.empty() || right_idx.empty()) return node_id;

        std::int32_t left_id = build(left_idx, depth + 1);
        std::int32_t right_id = build(right_idx, depth + 1);
        BoostedTreeNode& node = nodes[static_cast<std::size_t>(node_id)];
        node.is_leaf = false;
        node.feature = split->feature;
        node.threshold = split->threshold;
        node.left = left_id;
        node.right = right_id;
        return node_id;
    }
};

}  // namespace detail

/// Gradient-boosted model. The logistic objective keeps one score
/// accumulator (the margin for class M); softprob keeps one per class and
/// links through softmax.
struct BoostedModel {
    BoostObjective objective = BoostObjective::logistic;
    std::vector<double> base_scores;                 // one per accumulator
    std::vector<std::vector<BoostedTree>> rounds;    // rounds[r][accumulator]
    double learning_rate = 0.1;
    double l2_lambda = 0;

    bool trained() const { return !base_scores.empty(); }

    std::vector<double> predict_margin(const FeatureArray& f) const {
        if (base_scores.empty()) throw UntrainedModel("boosted model has no base score");
        std::vector<double> margin = base_scores;
        for (const auto& round : rounds)
            for (std::size_t k = 0; k < round.size(); ++k)
                margin[k] += learning_rate * round[k].predict(f);
        return margin;
    }

    Distribution predict_proba(const FeatureArray& f) const {
        std::vector<double> margin = predict_margin(f);
        if (objective == BoostObjective::logistic) {
            double p = detail::sigmoid(margin[0]);
            return {1.0 - p, p};
        }
        double m = std::max(margin[0], margin[1]);
        double eb = std::exp(margin[0] - m);
        double em = std::exp(margin[1] - m);
        return {eb / (eb + em), em / (eb + em)};
    }
    Distribution predict_proba(const PrivilegeVector& v) const {
        return predict_proba(v.as_features());
    }
};

/// First-order gradient boosting on logistic loss: trees fit the negative
/// gradients with least-squares structure, leaves take the Newton step.
inline BoostedModel train_gbt(const std::vector<FeatureArray>& x, const std::vector<Label>& y,
                              const GBTParams& params) {
    if (x.empty()) throw EmptyDataset("cannot boost on an empty dataset");
    if (x.size() != y.size()) throw LengthMismatch("features and labels differ in length");
    const std::size_t n = x.size();

    double positives = 0;
    for (Label l : y)
        if (l == Label::M) positives += 1.0;
    double p0 = std::clamp(positives / static_cast<double>(n), 1e-6, 1.0 - 1e-6);

    BoostedModel model;
    model.objective = BoostObjective::logistic;
    model.learning_rate = params.learning_rate;
    model.base_scores = {std::log(p0 / (1.0 - p0))};

    std::vector<double> margin(n, model.base_scores[0]);
    std::vector<double> g(n), h(n), ones(n, 1.0);
    for (std::size_t round = 0; round < params.n_rounds; ++round) {
        for (std::size_t i = 0; i < n; ++i) {
            double p = detail::sigmoid(margin[i]);
            double target = y[i] == Label::M ? 1.0 : 0.0;
            g[i] = p - target;
            h[i] = p * (1.0 - p);
        }
        detail::BoostTreeBuilder builder{x, g, ones, h, 0.0, 0.0, params.max_depth, 1.0, 10.0};
        std::vector<std::size_t> idx(n);
        for (std::size_t i = 0; i < n; ++i) idx[i] = i;
        builder.build(idx, 0);

        BoostedTree tree{std::move(builder.nodes)};
        for (std::size_t i = 0; i < n; ++i)
            margin[i] += params.learning_rate * tree.predict(x[i]);
        model.rounds.push_back({std::move(tree)});
    }
    return model;
}

/// Second-order boosting with the softprob objective: per round, one tree
/// per class on softmax gradients; leaf weight -G/(H + lambda); split gain
/// from the regularized second-order objective.
inline BoostedModel train_xgb(const std::vector<FeatureArray>& x, const std::vector<Label>& y,
                              const XGBParams& params) {
    if (x.empty()) throw EmptyDataset("cannot boost on an empty dataset");
    if (x.size() != y.size()) throw LengthMismatch("features and labels differ in length");
    const std::size_t n = x.size();

    BoostedModel model;
    model.objective = BoostObjective::softprob;
    model.learning_rate = params.learning_rate;
    model.l2_lambda = params.l2_lambda;
    model.base_scores = {0.0, 0.0};

    std::vector<std::array<double, 2>> margin(n, {0.0, 0.0});
    std::vector<double> g(n), h(n);
    std::vector<std::size_t> idx(n);
    for (std::size_t round = 0; round < params.n_rounds; ++round) {
        std::vector<BoostedTree> class_trees;
        class_trees.reserve(2);
        // Gradients for both classes come from the margins at round start.
        std::vector<std::array<double, 2>> prob(n);
        for (std::size_t i = 0; i < n; ++i) {
            double m = std::max(margin[i][0], margin[i][1]);
            double e0 = std::exp(margin[i][0] - m);
            double e1 = std::exp(margin[i][1] - m);
            prob[i] = {e0 / (e0 + e1), e1 / (e0 + e1)};
        }
        for (std::size_t k = 0; k < 2; ++k) {
            for (std::size_t i = 0; i < n; ++i) {
                double target = static_cast<std::size_t>(y[i]) == k ? 1.0 : 0.0;
                g[i] = prob[i][k] - target;
                h[i] = prob[i][k] * (1.0 - prob[i][k]);
            }
            detail::BoostTreeBuilder builder{x,
                                             g,
                                             h,
                                             h,
                                             params.l2_lambda,
                                             params.l2_lambda,
                                             params.max_depth,
                                             params.min_child_weight,
                                             0.0};
            for (std::size_t i = 0; i < n; ++i) idx[i] = i;
            builder.build(idx, 0);
            class_trees.push_back(BoostedTree{std::move(builder.nodes)});
        }
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < 2; ++k)
                margin[i][k] += params.learning_rate * class_trees[k].predict(x[i]);
        model.rounds.push_back(std::move(class_trees));
    }
    return model;
}

inline BoostedModel train_gbt(const Dataset& train, const GBTParams& params) {
    std::vector<FeatureArray> x;
    std::vector<Label> y;
    for (const auto& rec : train.records) {
        x.push_back(rec.features.as_features());
        y.push_back(rec.label);
    }
    return train_gbt(x, y, params);
}

inline BoostedModel train_xgb(const Dataset& train, const XGBParams& params) {
    std::vector<FeatureArray> x;
    std::vector<Label> y;
    for (const auto& rec : train.records) {
        x.push_back(rec.features.as_features());
        y.push_back(rec.label);
    }
    return train_xgb(x, y, params);
}

}  // namespace privml
