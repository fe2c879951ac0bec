#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "privml/decision_tree.hpp"
#include "privml/errors.hpp"
#include "privml/rng.hpp"
#include "privml/types.hpp"

namespace privml {

enum class AttributeSampling { all, sqrt };
enum class RowSampling { none, bootstrap };

struct EnsembleParams {
    std::size_t n_trees = 100;
    SplitCriterion criterion = SplitCriterion::gain_ratio;
    AttributeSampling attribute_sampling = AttributeSampling::sqrt;
    RowSampling row_sampling = RowSampling::none;
    std::size_t min_records_per_node = 5;

    /// Tree-ensemble configuration: gain ratio, 100 trees, sqrt attribute
    /// sampling, every tree sees the full training data.
    static EnsembleParams tree_ensemble() { return EnsembleParams{}; }

    /// Random-forest configuration: gini, 100 trees, sqrt attribute
    /// sampling, bootstrap row sampling.
    static EnsembleParams random_forest() {
        EnsembleParams p;
        p.criterion = SplitCriterion::gini;
        p.row_sampling = RowSampling::bootstrap;
        return p;
    }
};

struct EnsembleModel {
    std::vector<TreeModel> trees;
    EnsembleParams params;

    bool trained() const { return !trees.empty(); }

    /// Mean of the member leaf distributions.
    Distribution predict_proba(const FeatureArray& f) const {
        if (trees.empty()) throw UntrainedModel("ensemble has no trees");
        Distribution mean{0, 0};
        for (const auto& tree : trees) {
            Distribution d = tree.predict_proba(f);
            mean[0] += d[0];
            mean[1] += d[1];
        }
        mean[0] /= static_cast<double>(trees.size());
        mean[1] /= static_cast<double>(trees.size());
        return mean;
    }
    Distribution predict_proba(const PrivilegeVector& v) const {
        return predict_proba(v.as_features());
    }
};

/// Trains n trees on (optionally bootstrapped) rows with (optionally
/// subsampled) attributes per node. Tree t draws from a generator seeded
/// with derive_seed(seed, t), so members are independent of training
/// order and may be built in parallel.
inline EnsembleModel train_bagged_ensemble(const std::vector<FeatureArray>& x,
                                           const std::vector<Label>& y,
                                           const EnsembleParams& params, std::uint64_t seed) {
    if (x.empty()) throw EmptyDataset("cannot train an ensemble on an empty dataset");
    if (x.size() != y.size()) throw LengthMismatch("features and labels differ in length");
    if (params.n_trees == 0) throw ValueError("ensemble needs at least one tree");

    std::size_t features_per_node = kNumFeatures;
    if (params.attribute_sampling == AttributeSampling::sqrt)
        features_per_node = static_cast<std::size_t>(
            std::floor(std::sqrt(static_cast<double>(kNumFeatures))));

    DTParams tree_params;
    tree_params.criterion = params.criterion;
    tree_params.min_records_per_node = params.min_records_per_node;

    EnsembleModel model;
    model.params = params;
    model.trees.reserve(params.n_trees);

    for (std::size_t t = 0; t < params.n_trees; ++t) {
        Rng rng(derive_seed(seed, t));

        const std::vector<FeatureArray>* tx = &x;
        const std::vector<Label>* ty = &y;
        std::vector<FeatureArray> bx;
        std::vector<Label> by;
        if (params.row_sampling == RowSampling::bootstrap) {
            bx.reserve(x.size());
            by.reserve(x.size());
            for (std::size_t i = 0; i < x.size(); ++i) {
                std::size_t j = static_cast<std::size_t>(bounded(rng, x.size()));
                bx.push_back(x[j]);
                by.push_back(y[j]);
            }
            tx = &bx;
            ty = &by;
        }

        detail::TreeTrainer trainer{*tx, *ty, tree_params, features_per_node, &rng};
        std::vector<std::size_t> idx(tx->size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        trainer.build(idx);

        TreeModel tree;
        tree.nodes = std::move(trainer.nodes);
        tree.params = tree_params;
        model.trees.push_back(std::move(tree));
    }
    return model;
}

inline EnsembleModel train_bagged_ensemble(const Dataset& train, const EnsembleParams& params,
                                           std::uint64_t seed) {
    std::vector<FeatureArray> x;
    std::vector<Label> y;
    x.reserve(train.size());
    y.reserve(train.size());
    for (const auto& rec : train.records) {
        x.push_back(rec.features.as_features());
        y.push_back(rec.label);
    }
    return train_bagged_ensemble(x, y, params, seed);
}

}  // namespace privml
