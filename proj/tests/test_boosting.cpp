#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "privml/boosting.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace privml;

namespace {
std::size_t training_errors(const BoostedModel& model, const Dataset& ds) {
    std::size_t errors = 0;
    for (const auto& rec : ds.records)
        if (argmax_label(model.predict_proba(rec.features)) != rec.label) ++errors;
    return errors;
}
}  // namespace

TEST_CASE("gbt drives training error to zero on a separable set") {
    auto ds = fixtures::separable_dataset(12);
    GBTParams params;
    params.n_rounds = 50;
    auto model = train_gbt(ds, params);
    CHECK(training_errors(model, ds) == 0);
}

TEST_CASE("one depth-1 round with unit rate is the best stump on a step function") {
    // single informative feature: malicious iff rwx >= 8
    Dataset ds;
    for (int i = 0; i < 6; ++i)
        ds.records.push_back(fixtures::record(10 + i, 5, 3, 0, i, 0, Label::B));
    for (int i = 8; i < 14; ++i)
        ds.records.push_back(fixtures::record(10 + i, 5, 3, 0, i, 0, Label::M));

    GBTParams params;
    params.n_rounds = 1;
    params.learning_rate = 1.0;
    params.max_depth = 1;
    auto model = train_gbt(ds, params);

    auto x = fixtures::features_of(ds);
    auto y = fixtures::labels_of(ds);
    CHECK(training_errors(model, ds) == oracles::best_stump_errors(x, y));
    CHECK(training_errors(model, ds) == 0);

    // structurally a stump: one root split, two leaves
    REQUIRE(model.rounds.size() == 1);
    REQUIRE(model.rounds[0].size() == 1);
    CHECK(model.rounds[0][0].nodes.size() == 3);
}

TEST_CASE("boosted predictions are valid distributions") {
    auto ds = fixtures::random_dataset(60, 17);
    GBTParams gbt_params;
    gbt_params.n_rounds = 30;
    auto gbt = train_gbt(ds, gbt_params);
    XGBParams xgb_params;
    xgb_params.n_rounds = 30;
    auto xgb = train_xgb(ds, xgb_params);

    Rng rng(9);
    for (int probe = 0; probe < 100; ++probe) {
        PrivilegeVector v{static_cast<std::int64_t>(bounded(rng, 250)),
                          static_cast<std::int64_t>(bounded(rng, 250)),
                          static_cast<std::int64_t>(bounded(rng, 100)),
                          static_cast<std::int64_t>(bounded(rng, 60)),
                          static_cast<std::int64_t>(bounded(rng, 60)),
                          static_cast<std::int64_t>(bounded(rng, 10))};
        for (const auto* m : {&gbt, &xgb}) {
            auto d = m->predict_proba(v);
            CHECK(d[0] >= 0.0);
            CHECK(d[1] >= 0.0);
            CHECK(std::abs(d[0] + d[1] - 1.0) < 1e-9);
        }
    }
}

TEST_CASE("zero rounds predict the base-score distribution everywhere") {
    auto ds = fixtures::random_dataset(40, 3);
    GBTParams gbt_params;
    gbt_params.n_rounds = 0;
    auto gbt = train_gbt(ds, gbt_params);
    double positives = static_cast<double>(ds.count(Label::M));
    double expected_p = positives / static_cast<double>(ds.size());
    auto d = gbt.predict_proba(PrivilegeVector{1, 2, 3, 4, 5, 6});
    CHECK(d[1] == Catch::Approx(expected_p).margin(1e-9));

    XGBParams xgb_params;
    xgb_params.n_rounds = 0;
    auto xgb = train_xgb(ds, xgb_params);
    auto u = xgb.predict_proba(PrivilegeVector{9, 9, 9, 9, 9, 9});
    CHECK(u[0] == Catch::Approx(0.5));
    CHECK(u[1] == Catch::Approx(0.5));
}

TEST_CASE("huge l2 penalty pins predictions at the base score") {
    auto ds = fixtures::separable_dataset(10);
    XGBParams params;
    params.n_rounds = 5;
    params.l2_lambda = 1e12;
    auto model = train_xgb(ds, params);
    for (const auto& rec : ds.records) {
        auto d = model.predict_proba(rec.features);
        CHECK(std::abs(d[0] - 0.5) < 1e-6);
        CHECK(std::abs(d[1] - 0.5) < 1e-6);
    }
}

TEST_CASE("leaf weights are the newton step -G/(H+lambda)") {
    SECTION("lambda zero on a ten-record instance, against a numeric minimizer") {
        auto ds = fixtures::random_dataset(10, 77);
        if (ds.count(Label::M) == 0) ds.records[0].label = Label::M;
        if (ds.count(Label::B) == 0) ds.records[0].label = Label::B;
        XGBParams params;
        params.n_rounds = 1;
        params.l2_lambda = 0.0;
        params.max_depth = 2;
        auto model = train_xgb(ds, params);
        for (const auto& tree : model.rounds[0]) {
            for (const auto& node : tree.nodes) {
                if (!node.is_leaf) continue;
                CHECK(node.value == Catch::Approx(-node.g_sum / node.h_sum).epsilon(1e-12));
                // leaf objective: G w + (1/2)(H + lambda) w^2
                double g = node.g_sum, h = node.h_sum;
                double w_star =
                    oracles::grid_minimize([&](double w) { return g * w + 0.5 * h * w * w; },
                                           -20.0, 20.0);
                CHECK(node.value == Catch::Approx(w_star).margin(1e-6));
            }
        }
    }
    SECTION("production lambda, every leaf of every round") {
        auto ds = fixtures::random_dataset(50, 13);
        XGBParams params;
        params.n_rounds = 12;
        auto model = train_xgb(ds, params);
        REQUIRE(model.rounds.size() == 12);
        for (const auto& round : model.rounds) {
            REQUIRE(round.size() == 2);
            for (const auto& tree : round)
                for (const auto& node : tree.nodes)
                    if (node.is_leaf)
                        CHECK(node.value ==
                              Catch::Approx(-node.g_sum / (node.h_sum + params.l2_lambda))
                                  .margin(1e-12));
        }
    }
}

TEST_CASE("boosting is deterministic") {
    auto ds = fixtures::random_dataset(50, 29);
    XGBParams params;
    params.n_rounds = 10;
    auto a = train_xgb(ds, params);
    auto b = train_xgb(ds, params);
    Rng rng(1);
    for (int probe = 0; probe < 50; ++probe) {
        PrivilegeVector v{static_cast<std::int64_t>(bounded(rng, 200)), 0, 0, 0,
                          static_cast<std::int64_t>(bounded(rng, 60)), 0};
        auto da = a.predict_proba(v);
        auto db = b.predict_proba(v);
        CHECK(da[0] == db[0]);
    }
}

TEST_CASE("boosting input validation") {
    CHECK_THROWS_AS(train_gbt(Dataset{}, GBTParams{}), EmptyDataset);
    CHECK_THROWS_AS(train_xgb(Dataset{}, XGBParams{}), EmptyDataset);
    BoostedModel untrained;
    CHECK_THROWS_AS(untrained.predict_proba(PrivilegeVector{}), UntrainedModel);
}
