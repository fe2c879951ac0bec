#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "privml/errors.hpp"
#include "privml/rng.hpp"
#include "privml/types.hpp"

namespace privml {

/// Feed-forward network with logistic sigmoid on every layer, including
/// the two output units, whose activations are sum-normalized into a
/// distribution over {B, M}.
struct MLPModel {
    struct Layer {
        std::size_t n_in = 0;
        std::size_t n_out = 0;
        std::vector<double> w;  // row-major [n_out][n_in]
        std::vector<double> b;  // [n_out]
    };
    std::vector<Layer> layers;

    bool trained() const { return !layers.empty(); }
    std::size_t input_dim() const { return layers.empty() ? 0 : layers.front().n_in; }

    /// Raw activations of every layer; activations[0] is the input copy.
    void forward_activations(const std::vector<double>& input,
                             std::vector<std::vector<double>>& activations) const {
        if (layers.empty()) throw UntrainedModel("network has no layers");
        if (input.size() != layers.front().n_in)
            throw DimensionMismatch("input dimension does not match the network");
        activations.resize(layers.size() + 1);
        activations[0] = input;
        for (std::size_t l = 0; l < layers.size(); ++l) {
            const Layer& layer = layers[l];
            auto& out = activations[l + 1];
            out.assign(layer.n_out, 0.0);
            const auto& in = activations[l];
            for (std::size_t o = 0; o < layer.n_out; ++o) {
                double z = layer.b[o];
                const double* wrow = layer.w.data() + o * layer.n_in;
                for (std::size_t i = 0; i < layer.n_in; ++i) z += wrow[i] * in[i];
                out[o] = 1.0 / (1.0 + std::exp(-z));
            }
        }
    }

    Distribution predict_proba(const std::vector<double>& input) const {
        std::vector<std::vector<double>> acts;
        forward_activations(input, acts);
        const auto& o = acts.back();
        double s = o[0] + o[1];
        if (s <= 0) return {0.5, 0.5};
        return {o[0] / s, o[1] / s};
    }

    Distribution predict_proba(const FeatureArray& f) const {
        return predict_proba(std::vector<double>(f.begin(), f.end()));
    }
};

inline Distribution mlp_forward(const MLPModel& model, const std::vector<double>& input) {
    return model.predict_proba(input);
}

/// Gradient holder with the same shape as the model's weights.
struct MLPGradient {
    std::vector<std::vector<double>> w;  // per layer, row-major
    std::vector<std::vector<double>> b;

    static MLPGradient zeros_like(const MLPModel& model) {
        MLPGradient g;
        for (const auto& layer : model.layers) {
            g.w.emplace_back(layer.w.size(), 0.0);
            g.b.emplace_back(layer.b.size(), 0.0);
        }
        return g;
    }
};

/// Exact gradient of the summed cross-entropy loss over the batch, by
/// backpropagation. Also reports the loss value.
inline MLPGradient batch_gradient(const MLPModel& model,
                                  const std::vector<std::vector<double>>& x,
                                  const std::vector<Label>& y, double* loss_out = nullptr) {
    if (x.empty()) throw EmptyDataset("gradient of an empty batch");
    if (x.size() != y.size()) throw LengthMismatch("features and labels differ in length");

    MLPGradient grad = MLPGradient::zeros_like(model);
    double loss = 0;
    std::vector<std::vector<double>> acts;
    std::vector<double> delta, delta_prev;

    for (std::size_t r = 0; r < x.size(); ++r) {
        model.forward_activations(x[r], acts);
        const auto& out = acts.back();
        double s = std::max(out[0] + out[1], 1e-300);
        std::size_t target = static_cast<std::size_t>(y[r]);
        loss += -(std::log(std::max(out[target], 1e-300)) - std::log(s));

        // Output-unit error: d(loss)/dz_k = (p_k - y_k)(1 - o_k); the
        // sigmoid derivative's o_k factor cancels against the 1/o_k from
        // the normalized log-likelihood.
        delta.assign(out.size(), 0.0);
        for (std::size_t k = 0; k < out.size(); ++k) {
            double p = out[k] / s;
            double t = (k == target) ? 1.0 : 0.0;
            delta[k] = (p - t) * (1.0 - out[k]);
        }

        for (std::size_t l = model.layers.size(); l-- > 0;) {
            const auto& layer = model.layers[l];
            const auto& in = acts[l];
            auto& gw = grad.w[l];
            auto& gb = grad.b[l];
            for (std::size_t o = 0; o < layer.n_out; ++o) {
                double d = delta[o];
                gb[o] += d;
                double* gw_row = gw.data() + o * layer.n_in;
                for (std::size_t i = 0; i < layer.n_in; ++i) gw_row[i] += d * in[i];
            }
            if (l > 0) {
                delta_prev.assign(layer.n_in, 0.0);
                for (std::size_t o = 0; o < layer.n_out; ++o) {
                    double d = delta[o];
                    const double* wrow = layer.w.data() + o * layer.n_in;
                    for (std::size_t i = 0; i < layer.n_in; ++i) delta_prev[i] += d * wrow[i];
                }
                for (std::size_t i = 0; i < layer.n_in; ++i)
                    delta_prev[i] *= in[i] * (1.0 - in[i]);  // sigmoid derivative
                std::swap(delta, delta_prev);
            }
        }
    }
    if (loss_out != nullptr) *loss_out = loss;
    return grad;
}

struct RPropConstants {
    double eta_plus = 1.2;
    double eta_minus = 0.5;
    double delta_init = 0.1;
    double delta_min = 1e-6;
    double delta_max = 50.0;
};

/// Per-weight adaptive step sizes and previous gradient signs.
struct RPropState {
    RPropConstants constants;
    std::vector<std::vector<double>> delta_w, delta_b;
    std::vector<std::vector<int>> sign_w, sign_b;

    static RPropState init(const MLPModel& model, const RPropConstants& c = {}) {
        RPropState s;
        s.constants = c;
        for (const auto& layer : model.layers) {
            s.delta_w.emplace_back(layer.w.size(), c.delta_init);
            s.delta_b.emplace_back(layer.b.size(), c.delta_init);
            s.sign_w.emplace_back(layer.w.size(), 0);
            s.sign_b.emplace_back(layer.b.size(), 0);
        }
        return s;
    }
};

namespace detail {

inline void rprop_update_span(double* w, const double* g, double* delta, int* prev,
                              std::size_t n, const RPropConstants& c) {
    for (std::size_t i = 0; i < n; ++i) {
        int s = (g[i] > 0.0) - (g[i] < 0.0);
        if (s == 0) {
            prev[i] = 0;  // step size and weight stay put
            continue;
        }
        int agreement = prev[i] * s;
        if (agreement > 0) {
            delta[i] = std::min(delta[i] * c.eta_plus, c.delta_max);
            prev[i] = s;
        } else if (agreement < 0) {
            // sign flip: shrink and forget the sign, no backtracking
            delta[i] = std::max(delta[i] * c.eta_minus, c.delta_min);
            prev[i] = 0;
        } else {
            prev[i] = s;
        }
        w[i] -= static_cast<double>(s) * delta[i];
    }
}

}  // namespace detail

/// One resilient-propagation update of every weight and bias, in place.
inline void rprop_step(RPropState& state, const MLPGradient& grad, MLPModel& model) {
    if (grad.w.size() != model.layers.size() || state.delta_w.size() != model.layers.size())
        throw ShapeMismatch("gradient or state shape does not match the model");
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
        auto& layer = model.layers[l];
        if (grad.w[l].size() != layer.w.size() || grad.b[l].size() != layer.b.size())
            throw ShapeMismatch("gradient layer shape does not match the model");
        detail::rprop_update_span(layer.w.data(), grad.w[l].data(), state.delta_w[l].data(),
                                  state.sign_w[l].data(), layer.w.size(), state.constants);
        detail::rprop_update_span(layer.b.data(), grad.b[l].data(), state.delta_b[l].data(),
                                  state.sign_b[l].data(), layer.b.size(), state.constants);
    }
}

struct MLPTrainParams {
    std::size_t iterations = 10000;  // full-batch epochs
    std::vector<std::size_t> hidden = {15, 15};
    std::uint64_t seed = 1;
    double init_range = 0.5;  // weights start uniform in [-range, range]
    RPropConstants rprop;
};

inline MLPModel init_mlp(std::size_t input_dim, const std::vector<std::size_t>& hidden,
                         std::uint64_t seed, double init_range = 0.5) {
    MLPModel model;
    std::vector<std::size_t> dims;
    dims.push_back(input_dim);
    for (std::size_t h : hidden) dims.push_back(h);
    dims.push_back(2);
    Rng rng(seed);
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        MLPModel::Layer layer;
        layer.n_in = dims[l];
        layer.n_out = dims[l + 1];
        layer.w.resize(layer.n_in * layer.n_out);
        layer.b.resize(layer.n_out);
        for (auto& w : layer.w) w = uniform(rng, -init_range, init_range);
        for (auto& b : layer.b) b = uniform(rng, -init_range, init_range);
        model.layers.push_back(std::move(layer));
    }
    return model;
}

/// Full-batch RProp for the configured epoch count; returns the iterate
/// with the best training loss seen. Inputs are expected in [0,1].
inline MLPModel train_rprop_mlp(const std::vector<std::vector<double>>& x,
                                const std::vector<Label>& y, const MLPTrainParams& params) {
    if (x.empty()) throw EmptyDataset("cannot train on an empty dataset");
    if (x.size() != y.size()) throw LengthMismatch("features and labels differ in length");
    bool has_b = false, has_m = false;
    for (Label l : y) (l == Label::B ? has_b : has_m) = true;
    if (!has_b || !has_m) throw SingleClass("MLP training needs both classes");

    MLPModel model = init_mlp(x.front().size(), params.hidden, params.seed, params.init_range);
    RPropState state = RPropState::init(model, params.rprop);

    MLPModel best = model;
    double best_loss = std::numeric_limits<double>::infinity();
    for (std::size_t it = 0; it < params.iterations; ++it) {
        double loss = 0;
        MLPGradient grad = batch_gradient(model, x, y, &loss);
        if (loss < best_loss) {
            best_loss = loss;
            best = model;
        }
        rprop_step(state, grad, model);
    }
    double final_loss = 0;
    batch_gradient(model, x, y, &final_loss);
    if (final_loss < best_loss) best = model;
    return best;
}

}  // namespace privml
