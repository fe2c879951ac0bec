#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "privml/errors.hpp"
#include "privml/ingest.hpp"
#include "privml/rng.hpp"
#include "privml/types.hpp"

namespace privml {

enum class ProtectClass : std::uint8_t { R = 0, RW, RX, RWC, RWX, RWXC, Unknown };

/// Case-insensitive match against the six protection classes; anything
/// else is Unknown (a value, not an error).
inline ProtectClass canonicalize_protect(const std::string& flags) {
    std::string s;
    s.reserve(flags.size());
    for (char c : flags) s += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (s == "r") return ProtectClass::R;
    if (s == "rw") return ProtectClass::RW;
    if (s == "rx") return ProtectClass::RX;
    if (s == "rwc") return ProtectClass::RWC;
    if (s == "rwx") return ProtectClass::RWX;
    if (s == "rwxc") return ProtectClass::RWXC;
    return ProtectClass::Unknown;
}

struct PrivilegeTally {
    PrivilegeVector vector;
    std::int64_t unknown = 0;  // regions whose protect string matched no class
};

/// Sums region protection classes over one dump. Unknown strings tally to
/// the warning counter in lenient mode and raise in strict mode.
inline PrivilegeTally privilege_vector(const ProcessDump& dump,
                                       Strictness mode = Strictness::lenient) {
    PrivilegeTally tally;
    for (const auto& region : dump.regions) {
        ProtectClass c = canonicalize_protect(region.protect);
        if (c == ProtectClass::Unknown) {
            if (mode == Strictness::strict)
                throw UnknownPrivilege("unrecognized protect string '" + region.protect + "'");
            ++tally.unknown;
        } else {
            ++tally.vector[static_cast<std::size_t>(c)];
        }
    }
    return tally;
}

struct ExtractStats {
    std::size_t records = 0;
    std::int64_t unknown_regions = 0;
    std::size_t zero_vector_dumps = 0;  // kept in the output, flagged here
};

/// One record per process dump in the report, all carrying the given
/// label and category. Dumps with no recognized regions yield all-zero
/// vectors and are kept.
inline std::vector<LabeledRecord> extract_records(const SampleReport& report, Label label,
                                                  const std::string& category,
                                                  Strictness mode = Strictness::lenient,
                                                  ExtractStats* stats = nullptr) {
    std::vector<LabeledRecord> records;
    records.reserve(report.dumps.size());
    ExtractStats local;
    for (const auto& dump : report.dumps) {
        PrivilegeTally tally = privilege_vector(dump, mode);
        local.unknown_regions += tally.unknown;
        if (tally.vector.total() == 0) ++local.zero_vector_dumps;
        records.push_back(LabeledRecord{tally.vector, label, category});
    }
    local.records = records.size();
    if (stats != nullptr) *stats = local;
    return records;
}

struct SplitResult {
    Dataset train;
    Dataset test;
};

/// Stratified train/test split. Within each label stratum the records are
/// shuffled with the seeded generator and a prefix becomes the test set.
///
/// Test seats total ceil(test_fraction * n) and are apportioned to strata
/// by largest remainder, ties to the lower label index. Per label the test
/// count deviates from test_fraction * label_count by at most one record.
inline SplitResult stratified_split(const Dataset& dataset, double test_fraction,
                                    std::uint64_t seed) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0))
        throw ValueError("test_fraction must lie in (0, 1)");

    std::vector<std::size_t> strata[2];
    for (std::size_t i = 0; i < dataset.size(); ++i)
        strata[static_cast<std::size_t>(dataset.records[i].label)].push_back(i);
    if (strata[0].empty() || strata[1].empty())
        throw DegenerateSplit("dataset must contain at least one record of each label");

    const std::size_t total_test =
        static_cast<std::size_t>(std::ceil(test_fraction * static_cast<double>(dataset.size())));

    std::size_t take[2];
    double fractional[2];
    std::size_t assigned = 0;
    for (int l = 0; l < 2; ++l) {
        double exact = test_fraction * static_cast<double>(strata[l].size());
        take[l] = static_cast<std::size_t>(std::floor(exact));
        fractional[l] = exact - static_cast<double>(take[l]);
        assigned += take[l];
    }
    while (assigned < total_test) {
        int l = (fractional[0] >= fractional[1]) ? 0 : 1;
        ++take[l];
        fractional[l] = -1.0;
        ++assigned;
    }

    for (int l = 0; l < 2; ++l) {
        if (take[l] == 0 || take[l] >= strata[l].size())
            throw DegenerateSplit(std::string("label ") + (l == 0 ? 'B' : 'M') +
                                  " would receive an empty train or test partition");
    }

    Rng rng(seed);
    std::vector<bool> in_test(dataset.size(), false);
    for (int l = 0; l < 2; ++l) {
        shuffle(strata[l], rng);
        for (std::size_t k = 0; k < take[l]; ++k) in_test[strata[l][k]] = true;
    }

    // Both partitions keep the original record order.
    SplitResult out;
    for (std::size_t i = 0; i < dataset.size(); ++i)
        (in_test[i] ? out.test : out.train).records.push_back(dataset.records[i]);
    return out;
}

/// Per-feature training-set minima and maxima for [0,1] rescaling.
struct MinMaxParams {
    FeatureArray min{};
    FeatureArray max{};
    bool fitted = false;

    bool operator==(const MinMaxParams&) const = default;
};

inline MinMaxParams fit_minmax(const Dataset& train) {
    if (train.empty()) throw EmptyDataset("cannot fit normalization on an empty dataset");
    MinMaxParams p;
    p.min = train.records.front().features.as_features();
    p.max = p.min;
    for (const auto& rec : train.records) {
        FeatureArray f = rec.features.as_features();
        for (std::size_t i = 0; i < kNumFeatures; ++i) {
            p.min[i] = std::min(p.min[i], f[i]);
            p.max[i] = std::max(p.max[i], f[i]);
        }
    }
    p.fitted = true;
    return p;
}

/// (x - min) / (max - min), clamped to [0,1] so unseen test values cannot
/// leave the training range. Constant features map to 0.
inline FeatureArray apply_minmax(const MinMaxParams& params, const FeatureArray& f) {
    if (!params.fitted) throw UntrainedModel("normalization params not fitted");
    FeatureArray out;
    for (std::size_t i = 0; i < kNumFeatures; ++i) {
        double range = params.max[i] - params.min[i];
        double v = range > 0.0 ? (f[i] - params.min[i]) / range : 0.0;
        out[i] = std::clamp(v, 0.0, 1.0);
    }
    return out;
}

inline FeatureArray apply_minmax(const MinMaxParams& params, const PrivilegeVector& v) {
    return apply_minmax(params, v.as_features());
}

}  // namespace privml
