#pragma once

#include <string>
#include <vector>

#include "privml/rng.hpp"
#include "privml/types.hpp"

namespace fixtures {

/// The report fragment with one dump holding one "rw" region.
inline const char* kGoldenReport = R"({
  "procmemory": [
    {
      "regions": [
        {
          "protect": "rw",
          "end": "0x00020000",
          "addr": "0x00010000",
          "state": 4096,
          "offset": 24,
          "type": 262144,
          "size": 65536
        }
      ]
    }
  ]
})";

/// Six-row dataset sample covering both labels.
inline const char* kSampleCsv =
    "R,RW,RX,RWC,RWX,RWXC,LABEL,CATEGORY\n"
    "367,307,117,84,70,0,B,Utilities\n"
    "107,96,43,31,5,0,B,Utilities\n"
    "62,59,18,21,49,0,B,Utilities\n"
    "13,13,4,5,4,0,M,Cryptowall\n"
    "124,94,54,32,6,0,M,DarkSide\n"
    "239,289,79,104,98,22,M,DeathHiddenTear\n";

inline privml::LabeledRecord record(std::int64_t r, std::int64_t rw, std::int64_t rx,
                                    std::int64_t rwc, std::int64_t rwx, std::int64_t rwxc,
                                    privml::Label label, std::string category = "test") {
    privml::LabeledRecord rec;
    rec.features = privml::PrivilegeVector{r, rw, rx, rwc, rwx, rwxc};
    rec.label = label;
    rec.category = std::move(category);
    return rec;
}

/// The six rows of kSampleCsv as an in-memory dataset.
inline privml::Dataset sample_dataset() {
    privml::Dataset ds;
    ds.records = {
        record(367, 307, 117, 84, 70, 0, privml::Label::B, "Utilities"),
        record(107, 96, 43, 31, 5, 0, privml::Label::B, "Utilities"),
        record(62, 59, 18, 21, 49, 0, privml::Label::B, "Utilities"),
        record(13, 13, 4, 5, 4, 0, privml::Label::M, "Cryptowall"),
        record(124, 94, 54, 32, 6, 0, privml::Label::M, "DarkSide"),
        record(239, 289, 79, 104, 98, 22, privml::Label::M, "DeathHiddenTear"),
    };
    return ds;
}

/// Random dataset with a crisp single-feature boundary: benign iff the
/// rwx count is zero. 10 records per class by default.
inline privml::Dataset separable_dataset(std::size_t per_class = 10, std::uint64_t seed = 7) {
    privml::Rng rng(seed);
    privml::Dataset ds;
    for (std::size_t i = 0; i < per_class; ++i) {
        ds.records.push_back(record(static_cast<std::int64_t>(privml::bounded(rng, 50)),
                                    static_cast<std::int64_t>(privml::bounded(rng, 50)),
                                    static_cast<std::int64_t>(privml::bounded(rng, 20)), 0, 0, 0,
                                    privml::Label::B));
        ds.records.push_back(record(static_cast<std::int64_t>(privml::bounded(rng, 50)),
                                    static_cast<std::int64_t>(privml::bounded(rng, 50)),
                                    static_cast<std::int64_t>(privml::bounded(rng, 20)), 0,
                                    1 + static_cast<std::int64_t>(privml::bounded(rng, 30)), 0,
                                    privml::Label::M));
    }
    return ds;
}

/// Noisy two-cluster dataset with per-class structure; not linearly
/// crisp so trained models have something to chew on.
inline privml::Dataset random_dataset(std::size_t n, std::uint64_t seed) {
    privml::Rng rng(seed);
    privml::Dataset ds;
    for (std::size_t i = 0; i < n; ++i) {
        bool malicious = privml::bounded(rng, 2) == 1;
        std::int64_t base = 10 + static_cast<std::int64_t>(privml::bounded(rng, 200));
        auto jitter = [&](double frac) {
            return static_cast<std::int64_t>(frac * static_cast<double>(base) +
                                             static_cast<double>(privml::bounded(rng, 12)));
        };
        privml::LabeledRecord rec;
        if (malicious) {
            rec = record(jitter(0.3), jitter(0.25), jitter(0.1), jitter(0.15), jitter(0.2),
                         static_cast<std::int64_t>(privml::bounded(rng, 6)), privml::Label::M);
        } else {
            rec = record(jitter(0.4), jitter(0.3), jitter(0.15), jitter(0.08), jitter(0.05), 0,
                         privml::Label::B);
        }
        ds.records.push_back(rec);
    }
    return ds;
}

inline std::vector<privml::FeatureArray> features_of(const privml::Dataset& ds) {
    std::vector<privml::FeatureArray> x;
    for (const auto& rec : ds.records) x.push_back(rec.features.as_features());
    return x;
}

inline std::vector<privml::Label> labels_of(const privml::Dataset& ds) {
    std::vector<privml::Label> y;
    for (const auto& rec : ds.records) y.push_back(rec.label);
    return y;
}

}  // namespace fixtures
