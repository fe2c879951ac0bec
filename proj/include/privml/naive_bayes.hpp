#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "privml/errors.hpp"
#include "privml/types.hpp"

namespace privml {

/// Gaussian naive Bayes over the six privilege counts: class priors by
/// frequency, one Gaussian per class and feature, variances floored
/// relative to the pooled feature scale so constant features cannot
/// produce infinite densities.
struct GaussianNBModel {
    Distribution priors{0.5, 0.5};
    std::array<FeatureArray, 2> mean{};      // [class][feature]
    std::array<FeatureArray, 2> variance{};  // floored, see var_floor
    double var_floor = 0;
    bool fitted = false;
};

inline constexpr double kNBRelativeVarFloor = 1e-9;

inline GaussianNBModel train_naive_bayes(const std::vector<FeatureArray>& x,
                                         const std::vector<Label>& y) {
    if (x.empty()) throw EmptyDataset("cannot fit naive Bayes on an empty dataset");
    if (x.size() != y.size()) throw LengthMismatch("features and labels differ in length");

    std::array<std::size_t, 2> n{0, 0};
    for (Label l : y) ++n[static_cast<std::size_t>(l)];
    if (n[0] == 0 || n[1] == 0)
        throw InsufficientClassData("naive Bayes needs records of both classes");

    GaussianNBModel model;
    model.priors = {static_cast<double>(n[0]) / static_cast<double>(x.size()),
                    static_cast<double>(n[1]) / static_cast<double>(x.size())};

    for (std::size_t k = 0; k < 2; ++k) {
        model.mean[k].fill(0.0);
        model.variance[k].fill(0.0);
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
        std::size_t k = static_cast<std::size_t>(y[i]);
        for (std::size_t f = 0; f < kNumFeatures; ++f) model.mean[k][f] += x[i][f];
    }
    for (std::size_t k = 0; k < 2; ++k)
        for (std::size_t f = 0; f < kNumFeatures; ++f)
            model.mean[k][f] /= static_cast<double>(n[k]);
    for (std::size_t i = 0; i < x.size(); ++i) {
        std::size_t k = static_cast<std::size_t>(y[i]);
        for (std::size_t f = 0; f < kNumFeatures; ++f) {
            double d = x[i][f] - model.mean[k][f];
            model.variance[k][f] += d * d;
        }
    }
    for (std::size_t k = 0; k < 2; ++k)
        for (std::size_t f = 0; f < kNumFeatures; ++f)
            model.variance[k][f] /= static_cast<double>(n[k]);

    // Pooled per-feature variance fixes the scale of the floor.
    FeatureArray pooled_mean{};
    pooled_mean.fill(0.0);
    for (const auto& row : x)
        for (std::size_t f = 0; f < kNumFeatures; ++f) pooled_mean[f] += row[f];
    for (std::size_t f = 0; f < kNumFeatures; ++f)
        pooled_mean[f] /= static_cast<double>(x.size());
    double max_pooled_var = 0;
    for (std::size_t f = 0; f < kNumFeatures; ++f) {
        double v = 0;
        for (const auto& row : x) {
            double d = row[f] - pooled_mean[f];
            v += d * d;
        }
        max_pooled_var = std::max(max_pooled_var, v / static_cast<double>(x.size()));
    }
    model.var_floor = std::max(kNBRelativeVarFloor * max_pooled_var, 1e-300);
    for (std::size_t k = 0; k < 2; ++k)
        for (std::size_t f = 0; f < kNumFeatures; ++f)
            model.variance[k][f] = std::max(model.variance[k][f], model.var_floor);

    model.fitted = true;
    return model;
}

inline GaussianNBModel train_naive_bayes(const Dataset& train) {
    std::vector<FeatureArray> x;
    std::vector<Label> y;
    for (const auto& rec : train.records) {
        x.push_back(rec.features.as_features());
        y.push_back(rec.label);
    }
    return train_naive_bayes(x, y);
}

/// Posterior over {B, M}: prior times the product of per-feature Gaussian
/// densities, accumulated in log space and normalized by log-sum-exp.
inline Distribution nb_predict_proba(const GaussianNBModel& model, const FeatureArray& f) {
    if (!model.fitted) throw UntrainedModel("naive Bayes model not fitted");
    constexpr double kLog2Pi = 1.8378770664093453;
    std::array<double, 2> log_post;
    for (std::size_t k = 0; k < 2; ++k) {
        double lp = std::log(model.priors[k]);
        for (std::size_t j = 0; j < kNumFeatures; ++j) {
            double var = model.variance[k][j];
            double d = f[j] - model.mean[k][j];
            lp += -0.5 * (kLog2Pi + std::log(var)) - d * d / (2.0 * var);
        }
        log_post[k] = lp;
    }
    double m = std::max(log_post[0], log_post[1]);
    double e0 = std::exp(log_post[0] - m);
    double e1 = std::exp(log_post[1] - m);
    return {e0 / (e0 + e1), e1 / (e0 + e1)};
}

inline Distribution nb_predict_proba(const GaussianNBModel& model, const PrivilegeVector& v) {
    return nb_predict_proba(model, v.as_features());
}

}  // namespace privml
