#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "privml/errors.hpp"
#include "privml/features.hpp"
#include "privml/rng.hpp"
#include "privml/types.hpp"

namespace privml {

enum class SplitCriterion { gini, gain_ratio };

struct DTParams {
    SplitCriterion criterion = SplitCriterion::gini;
    std::size_t min_records_per_node = 5;  // no leaf may hold fewer records
    // Pruning is intentionally not implemented; trees grow until no
    // admissible split improves the criterion.
};

using ClassCounts = std::array<std::int64_t, 2>;

/// 1 - sum(p_i^2) over the two classes; in [0, 0.5].
inline double gini_impurity(const ClassCounts& counts) {
    std::int64_t total = counts[0] + counts[1];
    if (total <= 0) throw EmptyNode("gini impurity of an empty node");
    double sum_sq = 0;
    for (double c : {static_cast<double>(counts[0]), static_cast<double>(counts[1])}) {
        double p = c / static_cast<double>(total);
        sum_sq += p * p;
    }
    return 1.0 - sum_sq;
}

namespace detail {

inline double entropy_bits(const ClassCounts& counts) {
    std::int64_t total = counts[0] + counts[1];
    if (total <= 0) return 0.0;
    double h = 0;
    for (std::int64_t c : counts) {
        if (c == 0) continue;
        double p = static_cast<double>(c) / static_cast<double>(total);
        h -= p * std::log2(p);
    }
    return h;
}

}  // namespace detail

/// Information gain over split entropy (base-2). A split whose partition
/// entropy is zero, or whose gain is zero, scores 0.
inline double gain_ratio(const ClassCounts& parent,
                         const std::vector<ClassCounts>& children) {
    ClassCounts sum{0, 0};
    std::int64_t parent_total = parent[0] + parent[1];
    for (const auto& c : children) {
        sum[0] += c[0];
        sum[1] += c[1];
    }
    if (sum != parent) throw PartitionMismatch("children do not partition the parent counts");
    if (parent_total <= 0) throw EmptyNode("gain ratio of an empty node");

    double gain = detail::entropy_bits(parent);
    double split_info = 0;
    for (const auto& c : children) {
        std::int64_t n = c[0] + c[1];
        if (n == 0) continue;
        double w = static_cast<double>(n) / static_cast<double>(parent_total);
        gain -= w * detail::entropy_bits(c);
        split_info -= w * std::log2(w);
    }
    if (split_info <= 0.0 || gain <= 0.0) return 0.0;
    return gain / split_info;
}

struct SplitRule {
    std::size_t feature_index = 0;
    double threshold = 0;  // value <= threshold goes left
};

struct TreeNode {
    bool is_leaf = true;
    SplitRule rule;
    std::int32_t left = -1;
    std::int32_t right = -1;
    ClassCounts class_counts{0, 0};

    Distribution class_distribution() const {
        double total = static_cast<double>(class_counts[0] + class_counts[1]);
        if (total <= 0) return {0.5, 0.5};
        return {static_cast<double>(class_counts[0]) / total,
                static_cast<double>(class_counts[1]) / total};
    }
};

struct TreeModel {
    std::vector<TreeNode> nodes;  // nodes[0] is the root
    DTParams params;

    bool trained() const { return !nodes.empty(); }

    const TreeNode& leaf_for(const FeatureArray& f) const {
        if (nodes.empty()) throw UntrainedModel("decision tree has no nodes");
        std::size_t i = 0;
        while (!nodes[i].is_leaf) {
            const SplitRule& rule = nodes[i].rule;
            i = static_cast<std::size_t>(f[rule.feature_index] <= rule.threshold
                                             ? nodes[i].left
                                             : nodes[i].right);
        }
        return nodes[i];
    }

    Distribution predict_proba(const FeatureArray& f) const {
        return leaf_for(f).class_distribution();
    }
    Distribution predict_proba(const PrivilegeVector& v) const {
        return predict_proba(v.as_features());
    }
};

namespace detail {

struct CandidateSplit {
    std::size_t feature = 0;
    double threshold = 0;
    double score = 0;  // larger is better; criterion-dependent
    std::size_t left_count = 0;
};

struct TreeTrainer {
    const std::vector<FeatureArray>& x;
    const std::vector<Label>& y;
    DTParams params;
    // When set, each node draws this many candidate features at random
    // (without replacement) instead of scanning all six.
    std::size_t features_per_node = kNumFeatures;
    Rng* rng = nullptr;

    std::vector<TreeNode> nodes;

    static ClassCounts count_labels(const std::vector<Label>& y,
                                    const std::vector<std::size_t>& idx) {
        ClassCounts c{0, 0};
        for (std::size_t i : idx) ++c[static_cast<std::size_t>(y[i])];
        return c;
    }

    double split_score(const ClassCounts& parent, const ClassCounts& left,
                       const ClassCounts& right) const {
        if (params.criterion == SplitCriterion::gini) {
            std::int64_t n = parent[0] + parent[1];
            std::int64_t nl = left[0] + left[1];
            std::int64_t nr = right[0] + right[1];
            double weighted = (static_cast<double>(nl) * gini_impurity(left) +
                               static_cast<double>(nr) * gini_impurity(right)) /
                              static_cast<double>(n);
            return gini_impurity(parent) - weighted;
        }
        return gain_ratio(parent, {left, right});
    }

    /// Best admissible split for one feature, or nullopt. Candidate
    /// thresholds are midpoints between consecutive distinct values.
    std::optional<CandidateSplit> best_split_on_feature(const std::vector<std::size_t>& idx,
                                                        const ClassCounts& parent,
                                                        std::size_t feature) const {
        std::vector<std::pair<double, Label>> vals;
        vals.reserve(idx.size());
        for (std::size_t i : idx) vals.emplace_back(x[i][feature], y[i]);
        std::sort(vals.begin(), vals.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });

        std::optional<CandidateSplit> best;
        ClassCounts left{0, 0};
        std::size_t i = 0;
        while (i < vals.size()) {
            // consume one run of equal values
            double v = vals[i].first;
            while (i < vals.size() && vals[i].first == v) {
                ++left[static_cast<std::size_t>(vals[i].second)];
                ++i;
            }
            if (i == vals.size()) break;
            std::size_t left_n = static_cast<std::size_t>(left[0] + left[1]);
            std::size_t right_n = vals.size() - left_n;
            if (left_n < params.min_records_per_node || right_n < params.min_records_per_node)
                continue;
            ClassCounts right{parent[0] - left[0], parent[1] - left[1]};
            double score = split_score(parent, left, right);
            double threshold = v + (vals[i].first - v) / 2.0;
            if (!best || score > best->score) {
                best = CandidateSplit{feature, threshold, score, left_n};
            }
        }
        return best;
    }

    std::optional<CandidateSplit> best_split(const std::vector<std::size_t>& idx,
                                             const ClassCounts& parent) const {
        std::array<std::size_t, kNumFeatures> features{};
        std::size_t n_features = kNumFeatures;
        if (features_per_node < kNumFeatures && rng != nullptr) {
            auto sampled = sample_without_replacement(*rng, kNumFeatures, features_per_node);
            std::sort(sampled.begin(), sampled.end());  // tie rule needs ascending order
            n_features = sampled.size();
            for (std::size_t k = 0; k < n_features; ++k) features[k] = sampled[k];
        } else {
            for (std::size_t k = 0; k < kNumFeatures; ++k) features[k] = k;
        }

        std::optional<CandidateSplit> best;
        for (std::size_t k = 0; k < n_features; ++k) {
            auto cand = best_split_on_feature(idx, parent, features[k]);
            // Ties resolve to the lowest feature index, then the lowest
            // threshold; the scan order guarantees both.
            if (cand && cand->score > 1e-12 && (!best || cand->score > best->score)) best = cand;
        }
        return best;
    }

    std::int32_t build(std::vector<std::size_t>& idx) {
        ClassCounts counts = count_labels(y, idx);
        std::int32_t node_id = static_cast<std::int32_t>(nodes.size());
        nodes.push_back(TreeNode{});
        nodes[static_cast<std::size_t>(node_id)].class_counts = counts;

        bool pure = counts[0] == 0 || counts[1] == 0;
        if (pure || idx.size() < 2 * params.min_records_per_node) return node_id;

        auto split = best_split(idx, counts);
        if (!split) return node_id;

        std::vector<std::size_t> left_idx, right_idx;
        left_idx.reserve(split->left_count);
        right_idx.reserve(idx.size() - split->left_count);
        for (std::size_t i : idx)
            (x[i][split->feature] <= split->threshold ? left_idx : right_idx).push_back(i);
        idx.clear();
        idx.shrink_to_fit();

        std::int32_t left_id = build(left_idx);
        std::int32_t right_id = build(right_idx);
        TreeNode& node = nodes[static_cast<std::size_t>(node_id)];
        node.is_leaf = false;
        node.rule = SplitRule{split->feature, split->threshold};
        node.left = left_id;
        node.right = right_id;
        return node_id;
    }
};

}  // namespace detail

/// Greedy recursive partitioning, no pruning. Deterministic: candidate
/// enumeration order is fixed by (feature index, threshold), so record
/// order does not influence the result.
inline TreeModel train_decision_tree(const std::vector<FeatureArray>& x,
                                     const std::vector<Label>& y, const DTParams& params) {
    if (x.empty()) throw EmptyDataset("cannot train a tree on an empty dataset");
    if (x.size() != y.size()) throw LengthMismatch("features and labels differ in length");
    detail::TreeTrainer trainer{x, y, params};
    std::vector<std::size_t> idx(x.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    trainer.build(idx);
    TreeModel model;
    model.nodes = std::move(trainer.nodes);
    model.params = params;
    return model;
}

inline TreeModel train_decision_tree(const Dataset& train, const DTParams& params) {
    std::vector<FeatureArray> x;
    std::vector<Label> y;
    x.reserve(train.size());
    y.reserve(train.size());
    for (const auto& rec : train.records) {
        x.push_back(rec.features.as_features());
        y.push_back(rec.label);
    }
    return train_decision_tree(x, y, params);
}

}  // namespace privml
