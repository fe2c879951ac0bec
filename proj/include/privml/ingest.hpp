#pragma once

#include <cctype>
#include <cstdint>
#include <deque>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "privml/errors.hpp"
#include "privml/types.hpp"

namespace privml {

enum class Strictness { strict, lenient };

/// One memory region as reported by the sandbox. Addresses are kept
/// verbatim; they are OS-assigned metadata, not features.
struct RawMemoryRegion {
    std::string protect;
    std::string addr;
    std::string end;
    std::int64_t state = 0;
    std::int64_t region_type = 0;  // "type" in the report
    std::int64_t offset = 0;
    std::int64_t size = 0;
};

/// An ordered list of regions from one process memory dump. May be empty.
struct ProcessDump {
    std::vector<RawMemoryRegion> regions;
};

struct SampleReport {
    std::string sample_id;
    std::vector<ProcessDump> dumps;

    std::size_t total_regions() const {
        std::size_t n = 0;
        for (const auto& d : dumps) n += d.regions.size();
        return n;
    }
};

namespace detail {

inline bool parse_hex_address(const std::string& s, std::uint64_t& out) {
    std::string_view v(s);
    if (v.size() >= 2 && (v.substr(0, 2) == "0x" || v.substr(0, 2) == "0X")) v.remove_prefix(2);
    if (v.empty() || v.size() > 16) return false;
    std::uint64_t acc = 0;
    for (char c : v) {
        int d;
        if (c >= '0' && c <= '9') d = c - '0';
        else if (c >= 'a' && c <= 'f') d = c - 'a' + 10;
        else if (c >= 'A' && c <= 'F') d = c - 'A' + 10;
        else return false;
        acc = (acc << 4) | static_cast<std::uint64_t>(d);
    }
    out = acc;
    return true;
}

inline std::string json_string_field(const nlohmann::json& obj, const char* key, Strictness mode) {
    auto it = obj.find(key);
    if (it == obj.end()) {
        if (mode == Strictness::strict)
            throw RegionFieldError(std::string("region missing field '") + key + "'");
        return {};
    }
    if (!it->is_string()) {
        if (mode == Strictness::strict)
            throw RegionFieldError(std::string("region field '") + key + "' is not a string");
        return it->is_number() ? it->dump() : std::string{};
    }
    return it->get<std::string>();
}

inline std::int64_t json_int_field(const nlohmann::json& obj, const char* key, Strictness mode) {
    auto it = obj.find(key);
    if (it == obj.end()) {
        if (mode == Strictness::strict)
            throw RegionFieldError(std::string("region missing field '") + key + "'");
        return 0;
    }
    if (!it->is_number_integer()) {
        if (mode == Strictness::strict)
            throw RegionFieldError(std::string("region field '") + key + "' is not an integer");
        if (it->is_number()) return static_cast<std::int64_t>(it->get<double>());
        return 0;
    }
    return it->get<std::int64_t>();
}

inline RawMemoryRegion parse_region(const nlohmann::json& obj, Strictness mode) {
    if (!obj.is_object()) throw RegionFieldError("region entry is not an object");
    RawMemoryRegion r;
    r.protect = json_string_field(obj, "protect", mode);
    r.addr = json_string_field(obj, "addr", mode);
    r.end = json_string_field(obj, "end", mode);
    r.state = json_int_field(obj, "state", mode);
    r.region_type = json_int_field(obj, "type", mode);
    r.offset = json_int_field(obj, "offset", mode);
    r.size = json_int_field(obj, "size", mode);
    if (r.size < 0) {
        if (mode == Strictness::strict) throw RegionFieldError("region has negative size");
        r.size = 0;
    }
    std::uint64_t a = 0, e = 0;
    if (parse_hex_address(r.addr, a) && parse_hex_address(r.end, e) && e < a) {
        if (mode == Strictness::strict)
            throw RegionFieldError("region end address " + r.end + " precedes addr " + r.addr);
    }
    return r;
}

/// Breadth-first search for the first "procmemory" array anywhere in the
/// document. Object keys are visited in sorted order, so the result is
/// deterministic.
inline const nlohmann::json* find_procmemory(const nlohmann::json& root) {
    std::deque<const nlohmann::json*> queue{&root};
    while (!queue.empty()) {
        const nlohmann::json* node = queue.front();
        queue.pop_front();
        if (node->is_object()) {
            auto it = node->find("procmemory");
            if (it != node->end() && it->is_array()) return &*it;
            for (const auto& [key, value] : node->items())
                if (value.is_object() || value.is_array()) queue.push_back(&value);
        } else if (node->is_array()) {
            for (const auto& value : *node)
                if (value.is_object() || value.is_array()) queue.push_back(&value);
        }
    }
    return nullptr;
}

inline std::string extract_sample_id(const nlohmann::json& root, const std::string& fallback) {
    if (root.is_object()) {
        auto target = root.find("target");
        if (target != root.end() && target->is_object()) {
            auto file = target->find("file");
            if (file != target->end() && file->is_object()) {
                for (const char* key : {"name", "sha256", "md5"}) {
                    auto it = file->find(key);
                    if (it != file->end() && it->is_string() && !it->get<std::string>().empty())
                        return it->get<std::string>();
                }
            }
        }
    }
    return fallback;
}

}  // namespace detail

/// Parses a sandbox report document: either a full report whose root
/// carries a "procmemory" array, or a bare {"procmemory": [...]} fragment.
/// One ProcessDump per procmemory entry, region order preserved.
inline SampleReport parse_cuckoo_report(const std::string& text,
                                        Strictness mode = Strictness::strict,
                                        const std::string& fallback_id = "report") {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw MalformedDocument(std::string("not a well-formed JSON document: ") + e.what());
    }

    const nlohmann::json* procmemory = detail::find_procmemory(doc);
    if (procmemory == nullptr)
        throw MissingProcmemory("document has no 'procmemory' array");

    SampleReport report;
    report.sample_id = detail::extract_sample_id(doc, fallback_id);
    if (report.sample_id.empty()) report.sample_id = "report";

    for (const auto& entry : *procmemory) {
        ProcessDump dump;
        if (entry.is_object()) {
            auto regions = entry.find("regions");
            if (regions != entry.end() && regions->is_array()) {
                dump.regions.reserve(regions->size());
                for (const auto& region : *regions)
                    dump.regions.push_back(detail::parse_region(region, mode));
            } else if (mode == Strictness::strict) {
                throw RegionFieldError("procmemory entry has no 'regions' array");
            }
        } else if (mode == Strictness::strict) {
            throw RegionFieldError("procmemory entry is not an object");
        }
        report.dumps.push_back(std::move(dump));
    }
    return report;
}

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

inline std::string to_upper(std::string s) {
    for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return s;
}

inline std::int64_t parse_count(const std::string& raw, std::size_t line_no) {
    std::string s = trim(raw);
    if (s.empty()) throw ValueError("line " + std::to_string(line_no) + ": empty count field");
    std::size_t pos = 0;
    long long v = 0;
    try {
        v = std::stoll(s, &pos);
    } catch (const std::exception&) {
        throw ValueError("line " + std::to_string(line_no) + ": '" + s + "' is not an integer");
    }
    if (pos != s.size())
        throw ValueError("line " + std::to_string(line_no) + ": '" + s + "' is not an integer");
    if (v < 0)
        throw ValueError("line " + std::to_string(line_no) + ": negative count " + s);
    return v;
}

}  // namespace detail

inline constexpr const char* kDatasetHeader = "R,RW,RX,RWC,RWX,RWXC,LABEL,CATEGORY";

/// Reads a dataset from a header-prefixed comma-delimited stream.
inline Dataset load_dataset(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw SchemaError("empty dataset file");

    auto header = detail::split_csv_line(line);
    auto expected = detail::split_csv_line(kDatasetHeader);
    if (header.size() != expected.size()) {
        throw SchemaError("expected " + std::to_string(expected.size()) + " columns, found " +
                          std::to_string(header.size()));
    }
    for (std::size_t i = 0; i < expected.size(); ++i) {
        if (detail::to_upper(detail::trim(header[i])) != expected[i])
            throw SchemaError("column " + std::to_string(i + 1) + " is '" +
                              detail::trim(header[i]) + "', expected '" + expected[i] + "'");
    }

    Dataset ds;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        auto fields = detail::split_csv_line(line);
        if (fields.size() != 8)
            throw SchemaError("line " + std::to_string(line_no) + ": expected 8 fields, found " +
                              std::to_string(fields.size()));
        LabeledRecord rec;
        for (std::size_t i = 0; i < kNumFeatures; ++i)
            rec.features[i] = detail::parse_count(fields[i], line_no);
        std::string label = detail::trim(fields[6]);
        if (label.size() != 1)
            throw ValueError("line " + std::to_string(line_no) + ": label '" + label +
                             "' outside {B, M}");
        rec.label = label_from_char(label[0]);
        rec.category = detail::trim(fields[7]);
        ds.records.push_back(std::move(rec));
    }
    return ds;
}

inline Dataset load_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open dataset file: " + path);
    return load_dataset(in);
}

inline void save_dataset(const Dataset& ds, std::ostream& out) {
    if (ds.empty()) throw EmptyDataset("refusing to write an empty dataset");
    out << kDatasetHeader << '\n';
    for (const auto& rec : ds.records) {
        for (std::size_t i = 0; i < kNumFeatures; ++i) out << rec.features[i] << ',';
        out << label_char(rec.label) << ',' << rec.category << '\n';
    }
}

inline void save_dataset(const Dataset& ds, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    save_dataset(ds, out);
    out.flush();
    if (!out) throw IoError("write failed: " + path);
}

/// Canonical serialized form of a dataset, used for content digests.
inline std::string dataset_to_string(const Dataset& ds) {
    std::ostringstream os;
    save_dataset(ds, os);
    return os.str();
}

}  // namespace privml
