#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "privml/ingest.hpp"
#include "privml/rng.hpp"
#include "support/fixtures.hpp"

using namespace privml;

TEST_CASE("golden report parses to one dump with one rw region") {
    auto report = parse_cuckoo_report(fixtures::kGoldenReport);
    REQUIRE(report.dumps.size() == 1);
    REQUIRE(report.dumps[0].regions.size() == 1);
    const auto& region = report.dumps[0].regions[0];
    CHECK(region.protect == "rw");
    CHECK(region.addr == "0x00010000");
    CHECK(region.end == "0x00020000");
    CHECK(region.state == 4096);
    CHECK(region.region_type == 262144);
    CHECK(region.offset == 24);
    CHECK(region.size == 65536);
}

TEST_CASE("empty procmemory array gives zero dumps") {
    auto report = parse_cuckoo_report(R"({"procmemory": []})");
    CHECK(report.dumps.empty());
}

TEST_CASE("malformed and incomplete documents") {
    CHECK_THROWS_AS(parse_cuckoo_report(R"({"procmemory": [ {"regions": [)"), MalformedDocument);
    CHECK_THROWS_AS(parse_cuckoo_report("not json at all"), MalformedDocument);
    CHECK_THROWS_AS(parse_cuckoo_report(R"({"info": {"id": 1}})"), MissingProcmemory);
}

TEST_CASE("procmemory nested under a full report root is found") {
    std::string full = R"({
      "info": {"id": 42},
      "target": {"file": {"name": "sample.exe", "sha256": "aa"}},
      "analysis": {"procmemory": [{"regions": []}]}
    })";
    auto report = parse_cuckoo_report(full);
    CHECK(report.dumps.size() == 1);
    CHECK(report.sample_id == "sample.exe");
}

TEST_CASE("strict mode rejects missing or ill-typed region fields") {
    std::string missing = R"({"procmemory": [{"regions": [{"protect": "rw"}]}]})";
    CHECK_THROWS_AS(parse_cuckoo_report(missing, Strictness::strict), RegionFieldError);

    auto lenient = parse_cuckoo_report(missing, Strictness::lenient);
    REQUIRE(lenient.dumps.size() == 1);
    CHECK(lenient.dumps[0].regions[0].size == 0);
    CHECK(lenient.dumps[0].regions[0].addr.empty());

    std::string ill_typed = R"({"procmemory": [{"regions": [
        {"protect": 7, "end": "0x10", "addr": "0x00", "state": 0, "offset": 0, "type": 0, "size": 1}
    ]}]})";
    CHECK_THROWS_AS(parse_cuckoo_report(ill_typed, Strictness::strict), RegionFieldError);
}

TEST_CASE("strict mode enforces region invariants") {
    std::string negative_size = R"({"procmemory": [{"regions": [
        {"protect": "r", "end": "0x20", "addr": "0x10", "state": 0, "offset": 0, "type": 0, "size": -5}
    ]}]})";
    CHECK_THROWS_AS(parse_cuckoo_report(negative_size, Strictness::strict), RegionFieldError);
    CHECK(parse_cuckoo_report(negative_size, Strictness::lenient).dumps[0].regions[0].size == 0);

    std::string inverted = R"({"procmemory": [{"regions": [
        {"protect": "r", "end": "0x10", "addr": "0x20", "state": 0, "offset": 0, "type": 0, "size": 1}
    ]}]})";
    CHECK_THROWS_AS(parse_cuckoo_report(inverted, Strictness::strict), RegionFieldError);
}

TEST_CASE("region count is conserved across dumps") {
    std::string doc = R"({"procmemory": [
        {"regions": [
            {"protect": "r", "end": "0x20", "addr": "0x10", "state": 0, "offset": 0, "type": 0, "size": 1},
            {"protect": "rw", "end": "0x40", "addr": "0x30", "state": 0, "offset": 0, "type": 0, "size": 1}
        ]},
        {"regions": []},
        {"regions": [
            {"protect": "rx", "end": "0x60", "addr": "0x50", "state": 0, "offset": 0, "type": 0, "size": 1}
        ]}
    ]})";
    auto report = parse_cuckoo_report(doc);
    REQUIRE(report.dumps.size() == 3);
    CHECK(report.total_regions() == 3);
    CHECK(report.dumps[1].regions.empty());
}

TEST_CASE("parsing is pure") {
    auto a = parse_cuckoo_report(fixtures::kGoldenReport);
    auto b = parse_cuckoo_report(fixtures::kGoldenReport);
    CHECK(a.dumps.size() == b.dumps.size());
    CHECK(a.dumps[0].regions[0].protect == b.dumps[0].regions[0].protect);
    CHECK(a.sample_id == b.sample_id);
}

TEST_CASE("dataset loading") {
    SECTION("sample rows parse with values intact") {
        std::istringstream in(fixtures::kSampleCsv);
        auto ds = load_dataset(in);
        REQUIRE(ds.size() == 6);
        const auto& first = ds.records[0];
        CHECK(first.features == PrivilegeVector{367, 307, 117, 84, 70, 0});
        CHECK(first.label == Label::B);
        CHECK(first.category == "Utilities");
        const auto& cw = ds.records[3];
        CHECK(cw.features == PrivilegeVector{13, 13, 4, 5, 4, 0});
        CHECK(cw.label == Label::M);
        CHECK(cw.category == "Cryptowall");
    }
    SECTION("header matching is case-insensitive") {
        std::istringstream in("r,rw,rx,rwc,rwx,rwxc,label,category\n1,2,3,4,5,6,B,x\n");
        CHECK(load_dataset(in).size() == 1);
    }
    SECTION("wrong columns raise SchemaError") {
        std::istringstream in("A,B,C\n1,2,3\n");
        CHECK_THROWS_AS(load_dataset(in), SchemaError);
        std::istringstream in2("R,RW,RX,RWC,RWX,LABEL,CATEGORY,EXTRA\n");
        CHECK_THROWS_AS(load_dataset(in2), SchemaError);
    }
    SECTION("invalid values raise ValueError") {
        std::istringstream bad_label("R,RW,RX,RWC,RWX,RWXC,LABEL,CATEGORY\n1,2,3,4,5,6,X,c\n");
        CHECK_THROWS_AS(load_dataset(bad_label), ValueError);
        std::istringstream negative("R,RW,RX,RWC,RWX,RWXC,LABEL,CATEGORY\n-1,2,3,4,5,6,B,c\n");
        CHECK_THROWS_AS(load_dataset(negative), ValueError);
        std::istringstream non_int("R,RW,RX,RWC,RWX,RWXC,LABEL,CATEGORY\n1.5,2,3,4,5,6,B,c\n");
        CHECK_THROWS_AS(load_dataset(non_int), ValueError);
    }
}

TEST_CASE("dataset save/load round trip") {
    SECTION("sample dataset") {
        auto ds = fixtures::sample_dataset();
        std::ostringstream out;
        save_dataset(ds, out);
        std::istringstream in(out.str());
        CHECK(load_dataset(in) == ds);
    }
    SECTION("single record writes header plus one row") {
        Dataset ds;
        ds.records.push_back(fixtures::record(1, 2, 3, 4, 5, 6, Label::M, "cat"));
        std::ostringstream out;
        save_dataset(ds, out);
        CHECK(out.str() == std::string(kDatasetHeader) + "\n1,2,3,4,5,6,M,cat\n");
    }
    SECTION("random datasets round trip unchanged") {
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            auto ds = fixtures::random_dataset(1 + seed * 3, seed);
            std::ostringstream out;
            save_dataset(ds, out);
            std::istringstream in(out.str());
            CHECK(load_dataset(in) == ds);
        }
    }
    SECTION("unwritable path raises IoError") {
        auto ds = fixtures::sample_dataset();
        CHECK_THROWS_AS(save_dataset(ds, "/nonexistent-dir/out.csv"), IoError);
    }
    SECTION("empty dataset is refused") {
        Dataset empty;
        std::ostringstream out;
        CHECK_THROWS_AS(save_dataset(empty, out), EmptyDataset);
    }
}
