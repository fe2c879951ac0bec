#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <variant>
#include <vector>

#include "privml/errors.hpp"
#include "privml/features.hpp"
#include "privml/types.hpp"

namespace privml {

struct RbfKernel {
    double sigma = 0.1;  // k(x,y) = exp(-|x-y|^2 / (2 sigma^2))
};

struct PolynomialKernel {
    double power = 1.0;
    double bias = 1.0;
    double gamma = 1.0;  // k(x,y) = (gamma <x,y> + bias)^power
};

using KernelSpec = std::variant<RbfKernel, PolynomialKernel>;

inline double kernel_eval(const KernelSpec& spec, const std::vector<double>& x,
                          const std::vector<double>& y) {
    if (x.size() != y.size()) throw DimensionMismatch("kernel arguments differ in dimension");
    if (const auto* rbf = std::get_if<RbfKernel>(&spec)) {
        if (!(rbf->sigma > 0)) throw ValueError("RBF sigma must be positive");
        double d2 = 0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            double d = x[i] - y[i];
            d2 += d * d;
        }
        return std::exp(-d2 / (2.0 * rbf->sigma * rbf->sigma));
    }
    const auto& poly = std::get<PolynomialKernel>(spec);
    double dot = 0;
    for (std::size_t i = 0; i < x.size(); ++i) dot += x[i] * y[i];
    return std::pow(poly.gamma * dot + poly.bias, poly.power);
}

inline double kernel_eval(const KernelSpec& spec, const FeatureArray& x, const FeatureArray& y) {
    return kernel_eval(spec, std::vector<double>(x.begin(), x.end()),
                       std::vector<double>(y.begin(), y.end()));
}

struct SVMParams {
    KernelSpec kernel = RbfKernel{0.1};
    double c = 1.0;
    double tol = 1e-3;
    std::size_t max_iterations = 100000;  // single-pair optimization steps
};

/// Soft-margin kernel SVM. Labels map to y = -1 (B) and y = +1 (M); the
/// stored coefficients are alpha_i * y_i over the support vectors.
struct SVMModel {
    std::vector<FeatureArray> support_vectors;
    std::vector<double> coefficients;  // alpha_i * y_i
    double bias = 0;
    KernelSpec kernel = RbfKernel{0.1};
    double c = 1.0;
    MinMaxParams normalization;  // applied to every input at decision time
    bool fitted = false;

    // Full training state kept for constraint checks: alphas and labels of
    // every training record, support vector or not.
    std::vector<double> train_alphas;
    std::vector<double> train_labels;
};

namespace detail {

/// Dual solver, sequential pairwise optimization with maximal-violating-
/// pair selection: i from the set that can grow along +grad, j from the
/// set that can grow along -grad; the pair is optimized analytically on
/// its box segment. Deterministic for fixed inputs.
struct SmoSolver {
    const std::vector<FeatureArray>& x;
    const std::vector<double>& y;  // +/-1
    double c;
    double tol;
    std::size_t max_iterations;
    const KernelSpec& kernel;

    std::vector<double> alpha;
    double bias = 0;

    double kernel_ij(std::size_t i, std::size_t j, std::vector<std::vector<double>>& cache) const {
        double v = cache[i][j];
        if (std::isnan(v)) {
            v = kernel_eval(kernel, x[i], x[j]);
            cache[i][j] = v;
            cache[j][i] = v;
        }
        return v;
    }

    void solve() {
        const std::size_t n = x.size();
        alpha.assign(n, 0.0);
        // f_i = decision value without bias = sum_j alpha_j y_j K(i,j)
        std::vector<double> f(n, 0.0);
        std::vector<std::vector<double>> cache(
            n, std::vector<double>(n, std::numeric_limits<double>::quiet_NaN()));

        std::size_t iter = 0;
        while (true) {
            // gradient of the dual wrt alpha_i is 1 - y_i f_i; KKT scan
            // via the standard i_up / i_low bound pair.
            double g_max = -std::numeric_limits<double>::infinity();
            double g_min = std::numeric_limits<double>::infinity();
            std::ptrdiff_t i_up = -1, i_low = -1;
            for (std::size_t i = 0; i < n; ++i) {
                double yg = y[i] * f[i];
                bool can_up = (y[i] > 0 && alpha[i] < c) || (y[i] < 0 && alpha[i] > 0);
                bool can_low = (y[i] > 0 && alpha[i] > 0) || (y[i] < 0 && alpha[i] < c);
                if (can_up && y[i] - y[i] * yg > g_max) {
                    g_max = y[i] - y[i] * yg;
                    i_up = static_cast<std::ptrdiff_t>(i);
                }
                if (can_low && y[i] - y[i] * yg < g_min) {
                    g_min = y[i] - y[i] * yg;
                    i_low = static_cast<std::ptrdiff_t>(i);
                }
            }
            if (i_up < 0 || i_low < 0 || g_max - g_min <= tol) break;
            if (++iter > max_iterations)
                throw NoConvergence("SVM dual did not converge within the iteration cap");

            std::size_t i = static_cast<std::size_t>(i_up);
            std::size_t j = static_cast<std::size_t>(i_low);

            double kii = kernel_ij(i, i, cache);
            double kjj = kernel_ij(j, j, cache);
            double kij = kernel_ij(i, j, cache);
            double eta = kii + kjj - 2.0 * kij;
            if (eta < 1e-12) eta = 1e-12;

            // optimize alpha_i, alpha_j keeping sum y*alpha fixed
            double gi = 1.0 - y[i] * f[i];
            double gj = 1.0 - y[j] * f[j];
            double delta = (gi * y[i] - gj * y[j]) / eta;  // step along y_i dir for alpha_i

            double ai_old = alpha[i], aj_old = alpha[j];
            double ai = ai_old + y[i] * delta;
            double aj = aj_old - y[j] * delta;

            // clip to the box segment
            double lo_i = 0, hi_i = c;
            if (ai < lo_i) {
                aj = aj_old - y[j] * y[i] * (lo_i - ai_old);
                ai = lo_i;
            } else if (ai > hi_i) {
                aj = aj_old - y[j] * y[i] * (hi_i - ai_old);
                ai = hi_i;
            }
            if (aj < 0) {
                ai = ai_old + y[i] * y[j] * (aj_old - 0);
                aj = 0;
            } else if (aj > c) {
                ai = ai_old + y[i] * y[j] * (aj_old - c);
                aj = c;
            }

            double di = ai - ai_old;
            double dj = aj - aj_old;
            if (std::abs(di) < 1e-15 && std::abs(dj) < 1e-15) break;  // numerically stuck

            alpha[i] = ai;
            alpha[j] = aj;
            for (std::size_t t = 0; t < n; ++t)
                f[t] += y[i] * di * kernel_ij(i, t, cache) + y[j] * dj * kernel_ij(j, t, cache);
        }

        // bias from free support vectors, else the midpoint of the bounds
        double sum = 0;
        std::size_t free_count = 0;
        double lo = -std::numeric_limits<double>::infinity();
        double hi = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i) {
            double margin = y[i] - f[i];
            if (alpha[i] > 1e-9 && alpha[i] < c - 1e-9) {
                sum += margin;
                ++free_count;
            } else {
                // KKT at the box bounds: alpha=0 needs y(f+b) >= 1 and
                // alpha=C needs y(f+b) <= 1, each one-sided in b.
                bool at_lower = alpha[i] <= 1e-9;
                if ((at_lower && y[i] < 0) || (!at_lower && y[i] > 0))
                    hi = std::min(hi, margin);
                else
                    lo = std::max(lo, margin);
            }
        }
        if (free_count > 0)
            bias = sum / static_cast<double>(free_count);
        else if (std::isfinite(lo) && std::isfinite(hi))
            bias = (lo + hi) / 2.0;
        else if (std::isfinite(lo))
            bias = lo;
        else if (std::isfinite(hi))
            bias = hi;
        else
            bias = 0;
    }
};

}  // namespace detail

/// Trains the soft-margin SVM on min-max normalized inputs. Raw privilege
/// counts put all pairwise RBF similarities at numerical zero, so the
/// model always normalizes with parameters fitted on the training data
/// and stores them for prediction.
inline SVMModel train_svm(const Dataset& train, const SVMParams& params) {
    if (train.empty()) throw EmptyDataset("cannot train an SVM on an empty dataset");
    if (train.count(Label::B) == 0 || train.count(Label::M) == 0)
        throw SingleClass("SVM training needs both classes");
    if (!(params.c > 0)) throw ValueError("penalty C must be positive");

    SVMModel model;
    model.kernel = params.kernel;
    model.c = params.c;
    model.normalization = fit_minmax(train);

    std::vector<FeatureArray> x;
    std::vector<double> y;
    x.reserve(train.size());
    y.reserve(train.size());
    for (const auto& rec : train.records) {
        x.push_back(apply_minmax(model.normalization, rec.features));
        y.push_back(rec.label == Label::M ? 1.0 : -1.0);
    }

    detail::SmoSolver solver{x, y, params.c, params.tol, params.max_iterations, params.kernel};
    solver.solve();

    model.bias = solver.bias;
    model.train_alphas = solver.alpha;
    model.train_labels = y;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (solver.alpha[i] > 1e-12) {
            model.support_vectors.push_back(x[i]);
            model.coefficients.push_back(solver.alpha[i] * y[i]);
        }
    }
    model.fitted = true;
    return model;
}

struct SvmDecision {
    double score = 0;
    Label label = Label::M;
};

/// score = sum_i alpha_i y_i K(x_i, v) + b over the support vectors; v is
/// normalized with the model's stored parameters. A zero score resolves
/// to M.
inline SvmDecision svm_decision(const SVMModel& model, const PrivilegeVector& v) {
    if (!model.fitted) throw UntrainedModel("SVM model not fitted");
    FeatureArray f = apply_minmax(model.normalization, v);
    double score = model.bias;
    for (std::size_t i = 0; i < model.support_vectors.size(); ++i)
        score += model.coefficients[i] * kernel_eval(model.kernel, model.support_vectors[i], f);
    return {score, score > 0 ? Label::M : (score < 0 ? Label::B : Label::M)};
}

/// Normalized-input variant used when the caller already applied the
/// model's normalization.
inline SvmDecision svm_decision_normalized(const SVMModel& model, const FeatureArray& f) {
    if (!model.fitted) throw UntrainedModel("SVM model not fitted");
    double score = model.bias;
    for (std::size_t i = 0; i < model.support_vectors.size(); ++i)
        score += model.coefficients[i] * kernel_eval(model.kernel, model.support_vectors[i], f);
    return {score, score > 0 ? Label::M : (score < 0 ? Label::B : Label::M)};
}

}  // namespace privml
