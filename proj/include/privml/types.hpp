#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "privml/errors.hpp"

namespace privml {

/// Class label: B = benign, M = malicious.
enum class Label : std::uint8_t { B = 0, M = 1 };

inline char label_char(Label l) { return l == Label::B ? 'B' : 'M'; }

inline Label label_from_char(char c) {
    if (c == 'B' || c == 'b') return Label::B;
    if (c == 'M' || c == 'm') return Label::M;
    throw ValueError(std::string("invalid label '") + c + "', expected B or M");
}

/// Probability distribution over {B, M}, indexed by Label.
using Distribution = std::array<double, 2>;

/// Argmax label of a distribution; ties resolve to M so that ambiguous
/// inputs are treated as detections.
inline Label argmax_label(const Distribution& d) {
    return d[0] > d[1] ? Label::B : Label::M;
}

inline constexpr std::size_t kNumFeatures = 6;

/// Canonical feature order used everywhere in the system.
inline constexpr std::array<const char*, kNumFeatures> kFeatureNames = {
    "R", "RW", "RX", "RWC", "RWX", "RWXC"};

using FeatureArray = std::array<double, kNumFeatures>;

/// Counts of memory-region protection classes in one process dump.
struct PrivilegeVector {
    std::int64_t r = 0;
    std::int64_t rw = 0;
    std::int64_t rx = 0;
    std::int64_t rwc = 0;
    std::int64_t rwx = 0;
    std::int64_t rwxc = 0;

    std::int64_t& operator[](std::size_t i) {
        return (&r)[i];
    }
    std::int64_t operator[](std::size_t i) const {
        return (&r)[i];
    }

    std::int64_t total() const { return r + rw + rx + rwc + rwx + rwxc; }

    FeatureArray as_features() const {
        FeatureArray f;
        for (std::size_t i = 0; i < kNumFeatures; ++i) f[i] = static_cast<double>((*this)[i]);
        return f;
    }

    bool operator==(const PrivilegeVector&) const = default;
};

struct LabeledRecord {
    PrivilegeVector features;
    Label label = Label::B;
    std::string category;

    bool operator==(const LabeledRecord&) const = default;
};

/// Ordered collection of labeled records.
struct Dataset {
    std::vector<LabeledRecord> records;

    std::size_t size() const { return records.size(); }
    bool empty() const { return records.empty(); }

    std::size_t count(Label l) const {
        std::size_t n = 0;
        for (const auto& rec : records)
            if (rec.label == l) ++n;
        return n;
    }

    bool operator==(const Dataset&) const = default;
};

}  // namespace privml
