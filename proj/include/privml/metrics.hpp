#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "privml/errors.hpp"
#include "privml/types.hpp"

namespace privml {

/// 2x2 actual-vs-predicted counts. The per-label views (TP/FP/TN/FN) are
/// relabelings of the same four cells.
struct ConfusionMatrix {
    // cells[actual][predicted]
    std::int64_t cells[2][2] = {{0, 0}, {0, 0}};

    static ConfusionMatrix from_counts(std::int64_t bb, std::int64_t bm, std::int64_t mb,
                                       std::int64_t mm) {
        ConfusionMatrix cm;
        cm.cells[0][0] = bb;
        cm.cells[0][1] = bm;
        cm.cells[1][0] = mb;
        cm.cells[1][1] = mm;
        return cm;
    }

    /// Builds the matrix from a reference label's TP/FP/TN/FN view.
    static ConfusionMatrix from_class_view(Label reference, std::int64_t tp, std::int64_t fp,
                                           std::int64_t tn, std::int64_t fn) {
        std::size_t a = static_cast<std::size_t>(reference);
        ConfusionMatrix cm;
        cm.cells[a][a] = tp;
        cm.cells[a][1 - a] = fn;
        cm.cells[1 - a][a] = fp;
        cm.cells[1 - a][1 - a] = tn;
        return cm;
    }

    std::int64_t total() const {
        return cells[0][0] + cells[0][1] + cells[1][0] + cells[1][1];
    }
    std::int64_t tp(Label l) const {
        std::size_t a = static_cast<std::size_t>(l);
        return cells[a][a];
    }
    std::int64_t fn(Label l) const {
        std::size_t a = static_cast<std::size_t>(l);
        return cells[a][1 - a];
    }
    std::int64_t fp(Label l) const {
        std::size_t a = static_cast<std::size_t>(l);
        return cells[1 - a][a];
    }
    std::int64_t tn(Label l) const {
        std::size_t a = static_cast<std::size_t>(l);
        return cells[1 - a][1 - a];
    }
};

inline ConfusionMatrix confusion(const std::vector<Label>& predictions,
                                 const std::vector<Label>& truths) {
    if (predictions.size() != truths.size())
        throw LengthMismatch("predictions and truths differ in length");
    if (predictions.empty()) throw EmptyInput("no predictions to score");
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < truths.size(); ++i)
        ++cm.cells[static_cast<std::size_t>(truths[i])][static_cast<std::size_t>(predictions[i])];
    return cm;
}

/// Per-class ratios. Zero denominators yield 0 and set the degenerate
/// flag instead of raising, so batch evaluation survives empty folds.
struct ClassMetrics {
    double recall = 0;
    double precision = 0;
    double sensitivity = 0;
    double specificity = 0;
    double f_measure = 0;
    bool degenerate = false;
};

inline ClassMetrics class_metrics(const ConfusionMatrix& cm, Label label) {
    auto ratio = [](double num, double den, bool& flag) {
        if (den <= 0) {
            flag = true;
            return 0.0;
        }
        return num / den;
    };
    ClassMetrics m;
    double tp = static_cast<double>(cm.tp(label));
    double fp = static_cast<double>(cm.fp(label));
    double tn = static_cast<double>(cm.tn(label));
    double fn = static_cast<double>(cm.fn(label));
    m.recall = ratio(tp, tp + fn, m.degenerate);
    m.precision = ratio(tp, tp + fp, m.degenerate);
    m.sensitivity = m.recall;
    m.specificity = ratio(tn, tn + fp, m.degenerate);
    m.f_measure = ratio(2.0 * m.precision * m.recall, m.precision + m.recall, m.degenerate);
    return m;
}

inline double accuracy(const ConfusionMatrix& cm) {
    if (cm.total() <= 0) throw EmptyInput("empty confusion matrix");
    return static_cast<double>(cm.cells[0][0] + cm.cells[1][1]) /
           static_cast<double>(cm.total());
}

/// Cohen's kappa, (p_o - p_e) / (1 - p_e) with p_e from the row/column
/// marginals; defined as 0 when chance agreement is total.
inline double cohens_kappa(const ConfusionMatrix& cm) {
    double n = static_cast<double>(cm.total());
    if (n <= 0) throw EmptyInput("empty confusion matrix");
    double po = static_cast<double>(cm.cells[0][0] + cm.cells[1][1]) / n;
    double pe = 0;
    for (int k = 0; k < 2; ++k) {
        double row = static_cast<double>(cm.cells[k][0] + cm.cells[k][1]);
        double col = static_cast<double>(cm.cells[0][k] + cm.cells[1][k]);
        pe += (row / n) * (col / n);
    }
    if (pe >= 1.0) return 0.0;
    return (po - pe) / (1.0 - pe);
}

struct MetricsReport {
    ConfusionMatrix matrix;
    ClassMetrics benign;
    ClassMetrics malicious;
    double overall_accuracy = 0;
    double kappa = 0;
};

inline MetricsReport metrics_report(const ConfusionMatrix& cm) {
    MetricsReport r;
    r.matrix = cm;
    r.benign = class_metrics(cm, Label::B);
    r.malicious = class_metrics(cm, Label::M);
    r.overall_accuracy = accuracy(cm);
    r.kappa = cohens_kappa(cm);
    return r;
}

struct RocPoint {
    double threshold;  // classify M iff score >= threshold
    double fpr;
    double tpr;
};

/// Threshold sweep over the scores for class M. Points run from (0,0) at
/// threshold +inf to (1,1) at the minimum score; tied scores form a
/// single step.
struct RocCurve {
    std::vector<RocPoint> points;
    double auc = 0;
};

inline double trapezoid_auc(const std::vector<RocPoint>& points) {
    double area = 0;
    for (std::size_t i = 1; i < points.size(); ++i) {
        area += (points[i].fpr - points[i - 1].fpr) * (points[i].tpr + points[i - 1].tpr) / 2.0;
    }
    return area;
}

inline RocCurve roc_curve(const std::vector<double>& scores, const std::vector<Label>& truths) {
    if (scores.size() != truths.size())
        throw LengthMismatch("scores and truths differ in length");
    if (scores.empty()) throw EmptyInput("no scores");
    std::size_t n_pos = 0, n_neg = 0;
    for (Label t : truths) (t == Label::M ? n_pos : n_neg)++;
    if (n_pos == 0 || n_neg == 0)
        throw SingleClass("ROC requires both classes among the truths");

    std::vector<std::size_t> order(scores.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    RocCurve curve;
    curve.points.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});
    std::size_t tp = 0, fp = 0;
    std::size_t i = 0;
    while (i < order.size()) {
        double t = scores[order[i]];
        while (i < order.size() && scores[order[i]] == t) {
            (truths[order[i]] == Label::M ? tp : fp)++;
            ++i;
        }
        curve.points.push_back({t, static_cast<double>(fp) / static_cast<double>(n_neg),
                                static_cast<double>(tp) / static_cast<double>(n_pos)});
    }
    curve.auc = trapezoid_auc(curve.points);
    return curve;
}

inline double auc(const RocCurve& curve) { return curve.auc; }

namespace detail {

inline std::string format_fixed(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
    return buf;
}

}  // namespace detail

/// One algorithm's row in the comparative summary.
struct SummaryRow {
    std::string name;                  // display code, e.g. "DT"
    double accuracy_mean = 0;          // fraction in [0,1]
    std::optional<double> accuracy_stddev;
    std::optional<double> auc;         // absent for label-only classifiers
};

/// Canonical column order for the comparative report.
inline const std::vector<std::string>& summary_order() {
    static const std::vector<std::string> order = {"DT", "TE", "RF", "NB",
                                                   "XG", "GB", "SVM", "NN"};
    return order;
}

struct SummaryTable {
    std::vector<SummaryRow> rows;

    /// Reorders rows into the canonical column order; names outside the
    /// canonical set keep their relative order at the end.
    void canonicalize() {
        const auto& order = summary_order();
        auto rank = [&](const std::string& name) {
            for (std::size_t i = 0; i < order.size(); ++i)
                if (order[i] == name) return i;
            return order.size();
        };
        std::stable_sort(rows.begin(), rows.end(), [&](const SummaryRow& a, const SummaryRow& b) {
            return rank(a.name) < rank(b.name);
        });
    }

    std::string to_text() const {
        std::ostringstream os;
        os << "TECHNIQUE";
        for (const auto& r : rows) os << '\t' << r.name;
        os << "\nAccuracy (%)";
        for (const auto& r : rows) os << '\t' << detail::format_fixed(100.0 * r.accuracy_mean, 2);
        bool any_stddev = false;
        for (const auto& r : rows) any_stddev = any_stddev || r.accuracy_stddev.has_value();
        if (any_stddev) {
            os << "\nStddev (%)";
            for (const auto& r : rows)
                os << '\t'
                   << (r.accuracy_stddev ? detail::format_fixed(100.0 * *r.accuracy_stddev, 2)
                                         : std::string("-"));
        }
        os << "\nAUC";
        for (const auto& r : rows)
            os << '\t' << (r.auc ? detail::format_fixed(*r.auc, 3) : std::string("-"));
        os << '\n';
        return os.str();
    }

    std::string to_csv() const {
        std::ostringstream os;
        os << "technique,accuracy_percent";
        bool any_stddev = false;
        for (const auto& r : rows) any_stddev = any_stddev || r.accuracy_stddev.has_value();
        if (any_stddev) os << ",accuracy_stddev_percent";
        os << ",auc\n";
        for (const auto& r : rows) {
            os << r.name << ',' << detail::format_fixed(100.0 * r.accuracy_mean, 2);
            if (any_stddev)
                os << ','
                   << (r.accuracy_stddev ? detail::format_fixed(100.0 * *r.accuracy_stddev, 2)
                                         : std::string(""));
            os << ',' << (r.auc ? detail::format_fixed(*r.auc, 3) : std::string("")) << '\n';
        }
        return os.str();
    }

    nlohmann::json to_json() const {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& r : rows) {
            nlohmann::json row;
            row["technique"] = r.name;
            row["accuracy"] = r.accuracy_mean;
            if (r.accuracy_stddev) row["accuracy_stddev"] = *r.accuracy_stddev;
            if (r.auc)
                row["auc"] = *r.auc;
            else
                row["auc"] = nullptr;
            arr.push_back(row);
        }
        return arr;
    }
};

inline SummaryTable summary_table(std::vector<SummaryRow> rows) {
    if (rows.empty()) throw EmptyInput("summary requires at least one result");
    SummaryTable t{std::move(rows)};
    t.canonicalize();
    return t;
}

/// Renders one model's evaluation in the per-algorithm table layout:
/// a row per class plus the overall accuracy and kappa.
inline std::string format_metrics_report(const MetricsReport& r) {
    std::ostringstream os;
    os << "Label\tTP\tFP\tTN\tFN\tRecall\tPrecision\tSensitivity\tSpecificity\tF-measure\n";
    for (Label l : {Label::B, Label::M}) {
        const ClassMetrics& m = (l == Label::B) ? r.benign : r.malicious;
        os << label_char(l) << '\t' << r.matrix.tp(l) << '\t' << r.matrix.fp(l) << '\t'
           << r.matrix.tn(l) << '\t' << r.matrix.fn(l) << '\t'
           << detail::format_fixed(m.recall, 4) << '\t' << detail::format_fixed(m.precision, 4)
           << '\t' << detail::format_fixed(m.sensitivity, 4) << '\t'
           << detail::format_fixed(m.specificity, 4) << '\t'
           << detail::format_fixed(m.f_measure, 4) << '\n';
    }
    os << "Accuracy\t" << detail::format_fixed(r.overall_accuracy, 4) << '\n';
    os << "Cohen's kappa\t" << detail::format_fixed(r.kappa, 4) << '\n';
    return os.str();
}

}  // namespace privml
