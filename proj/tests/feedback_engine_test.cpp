#include <doctest.h>

#include <algorithm>

#include "freshrank/feedback_engine.hpp"
#include "freshrank/rng.hpp"

using namespace freshrank;

namespace {

Inventory abc_inventory() {
    return build_inventory({{"a", "X", {}}, {"b", "Y", {}}, {"c", "Z", {}}});
}

ScoreVector relevance(std::vector<double> values) {
    return ScoreVector{std::move(values), ScoreKind::Relevance};
}

ScoreVector weights(std::vector<double> values) {
    return ScoreVector{std::move(values), ScoreKind::NegativeWeights};
}

ScoreVector finals(std::vector<double> values) {
    return ScoreVector{std::move(values), ScoreKind::Final};
}

EventRecord click(const UserId& user, const ProductId& id, Timestamp ts) {
    return {user, id, EventKind::Clicked, std::nullopt, ts};
}

EventRecord dwell(const UserId& user, const ProductId& id, double seconds, Timestamp ts) {
    return {user, id, EventKind::Dwell, seconds, ts};
}

EventRecord add(const UserId& user, const ProductId& id, Timestamp ts) {
    return {user, id, EventKind::AddedToPriorityList, std::nullopt, ts};
}

// Rank of a product in a full descending serve (0 = best).
std::size_t rank_of(const RecommendationList& list, const ProductId& id) {
    const auto it = std::find(list.items.begin(), list.items.end(), id);
    REQUIRE(it != list.items.end());
    return static_cast<std::size_t>(it - list.items.begin());
}

}  // namespace

TEST_CASE("combine_scores subtracts weights elementwise") {
    CHECK(combine_scores(relevance({0.9, 0.8}), weights({1.0, 1.0})).values ==
          std::vector<double>{0.9 - 1.0, 0.8 - 1.0});
    CHECK(combine_scores(relevance({0.9, 0.8}), weights({1.5, 1.0})).values ==
          std::vector<double>{0.9 - 1.5, 0.8 - 1.0});
    for (double x : {-3.5, 0.0, 0.25, 7.0}) {
        CHECK(combine_scores(relevance({x}), weights({0.0})).values == std::vector<double>{x});
    }
    CHECK(combine_scores(relevance({0.5}), weights({2.0})).kind == ScoreKind::Final);
}

TEST_CASE("combine_scores validates lengths and kinds") {
    CHECK_THROWS_AS(combine_scores(relevance({0.1, 0.2}), weights({1.0})), LengthMismatch);
    CHECK_THROWS_AS(combine_scores(finals({0.1}), weights({1.0})), KindMismatch);
    CHECK_THROWS_AS(combine_scores(relevance({0.1}), relevance({1.0})), KindMismatch);
}

TEST_CASE("serve_top_t picks highest scores descending") {
    const Inventory inventory = abc_inventory();
    const RecommendationList list = serve_top_t(finals({-0.1, -0.2, 0.5}), 2, {}, inventory);
    CHECK(list.items == std::vector<ProductId>{"c", "a"});
    CHECK(list.scores == std::vector<double>{0.5, -0.1});
    CHECK(!list.truncated);
}

TEST_CASE("serve_top_t returns everything when t exceeds the pool") {
    const Inventory inventory = abc_inventory();
    const RecommendationList list = serve_top_t(finals({0.3, 0.2, 0.1}), 5, {}, inventory);
    CHECK(list.items.size() == 3);
    CHECK(list.truncated);
}

TEST_CASE("serve_top_t breaks ties by ascending product id") {
    const Inventory inventory = build_inventory({{"b", "X", {}}, {"a", "Y", {}}});
    const RecommendationList list = serve_top_t(finals({0.5, 0.5}), 1, {}, inventory);
    CHECK(list.items == std::vector<ProductId>{"a"});
}

TEST_CASE("serve_top_t honors exclusions and validates them") {
    const Inventory inventory = abc_inventory();
    const RecommendationList list = serve_top_t(finals({0.9, 0.5, 0.1}), 2, {"a"}, inventory);
    CHECK(list.items == std::vector<ProductId>{"b", "c"});
    CHECK_THROWS_AS(serve_top_t(finals({0.9, 0.5, 0.1}), 2, {"nope"}, inventory),
                    UnknownProduct);
    CHECK_THROWS_AS(serve_top_t(finals({0.9, 0.5, 0.1}), 0, {}, inventory), InvalidArgument);
}

TEST_CASE("build_dwell_array keys on click-without-add") {
    const Inventory inventory = abc_inventory();
    const UserSessionState state = new_user_state("u1", inventory, 3);
    const PenaltyConfig config;

    SUBCASE("clicked, dwelled, not added: dwell counts") {
        const auto array = build_dwell_array(
            {click("u1", "a", 1), dwell("u1", "a", 30.0, 2)}, state, inventory, config);
        CHECK(array.values == std::vector<double>{30.0, 0.0, 0.0});
    }
    SUBCASE("clicked, dwelled, added: dwell suppressed") {
        const auto array = build_dwell_array(
            {click("u1", "a", 1), dwell("u1", "a", 30.0, 2), add("u1", "a", 3)}, state,
            inventory, config);
        CHECK(array.values == std::vector<double>{0.0, 0.0, 0.0});
    }
    SUBCASE("no events: all zero") {
        const auto array = build_dwell_array({}, state, inventory, config);
        CHECK(array.values == std::vector<double>{0.0, 0.0, 0.0});
    }
    SUBCASE("dwell without click contributes nothing") {
        const auto array =
            build_dwell_array({dwell("u1", "b", 45.0, 1)}, state, inventory, config);
        CHECK(array.values == std::vector<double>{0.0, 0.0, 0.0});
    }
    SUBCASE("dwell sums across repeated visits") {
        const auto array = build_dwell_array(
            {click("u1", "a", 1), dwell("u1", "a", 10.0, 2), dwell("u1", "a", 5.0, 3)}, state,
            inventory, config);
        CHECK(array.values == std::vector<double>{15.0, 0.0, 0.0});
    }
    SUBCASE("require_click_without_add=false keeps added products penalizable") {
        PenaltyConfig relaxed;
        relaxed.require_click_without_add = false;
        const auto array = build_dwell_array(
            {click("u1", "a", 1), dwell("u1", "a", 30.0, 2), add("u1", "a", 3)}, state,
            inventory, relaxed);
        CHECK(array.values == std::vector<double>{30.0, 0.0, 0.0});
    }
    SUBCASE("foreign user events are rejected") {
        CHECK_THROWS_AS(build_dwell_array({click("intruder", "a", 1)}, state, inventory, config),
                        ForeignUserEvent);
    }
}

TEST_CASE("apply_penalty adds coefficient * dwell") {
    const Inventory inventory = build_inventory({{"a", "X", {}}, {"b", "Y", {}}});
    UserSessionState state = new_user_state("u1", inventory, 3);
    PenaltyConfig config;
    config.dwell_coefficient = 0.01;

    state = apply_penalty(std::move(state), weights({30.0, 0.0}), config, 500);
    CHECK(state.negative_weights.values[0] == doctest::Approx(1.3));
    CHECK(state.negative_weights.values[1] == 1.0);
    CHECK(state.weight_set_at[0] == 500);
    CHECK(state.weight_set_at[1] == kNeverSet);
}

TEST_CASE("apply_penalty with zero dwell is the identity") {
    const Inventory inventory = abc_inventory();
    const UserSessionState before = new_user_state("u1", inventory, 3);
    const UserSessionState after =
        apply_penalty(before, weights({0.0, 0.0, 0.0}), PenaltyConfig{}, 999);
    CHECK(after == before);
}

TEST_CASE("apply_penalty is additive in the dwell array") {
    const Inventory inventory = build_inventory({{"a", "X", {}}, {"b", "Y", {}}});
    PenaltyConfig config;
    config.dwell_coefficient = 0.25;  // exact in binary, so additivity is bitwise
    const UserSessionState base = new_user_state("u1", inventory, 3);

    UserSessionState twice = apply_penalty(base, weights({8.0, 0.0}), config, 7);
    twice = apply_penalty(std::move(twice), weights({8.0, 0.0}), config, 7);
    const UserSessionState once = apply_penalty(base, weights({16.0, 0.0}), config, 7);
    CHECK(twice == once);
}

TEST_CASE("apply_penalty validates the array length") {
    const Inventory inventory = abc_inventory();
    UserSessionState state = new_user_state("u1", inventory, 3);
    CHECK_THROWS_AS(apply_penalty(std::move(state), weights({1.0}), PenaltyConfig{}, 0),
                    LengthMismatch);
}

TEST_CASE("per-node age decay resets only stale nodes") {
    const Inventory inventory = abc_inventory();
    UserSessionState state = new_user_state("u1", inventory, 3);
    const Timestamp now = 100 * kSecondsPerDay;
    state.negative_weights.values = {1.8, 1.4, 1.0};
    state.weight_set_at = {now - 8 * kSecondsPerDay, now - 2 * kSecondsPerDay, kNeverSet};

    const auto decayed =
        apply_decay(state, {DecayPolicy::Variant::PerNodeAge, 7}, now);
    CHECK(decayed.negative_weights.values == std::vector<double>{1.0, 1.4, 1.0});
    CHECK(decayed.weight_set_at[0] == kNeverSet);
    CHECK(decayed.weight_set_at[1] == now - 2 * kSecondsPerDay);
}

TEST_CASE("full reset by serves restores everything at the threshold") {
    const Inventory inventory = abc_inventory();
    UserSessionState state = new_user_state("u1", inventory, 3);
    state.negative_weights.values = {2.0, 3.0, 1.5};
    state.weight_set_at = {10, 20, 30};
    state.serve_count = 100;

    const auto decayed =
        apply_decay(state, {DecayPolicy::Variant::FullResetByServes, 100}, 40);
    CHECK(decayed.negative_weights.values == std::vector<double>{1.0, 1.0, 1.0});
    CHECK(decayed.serve_count == 0);

    state.serve_count = 99;
    const auto untouched =
        apply_decay(state, {DecayPolicy::Variant::FullResetByServes, 100}, 40);
    CHECK(untouched.negative_weights.values == std::vector<double>{2.0, 3.0, 1.5});
}

TEST_CASE("suppression decay zeroes the counter with the weight") {
    const Inventory inventory = abc_inventory();
    UserSessionState state = new_user_state("u1", inventory, 3);
    state.negative_weights.values = {2.0, 1.7, 1.0};
    state.weight_set_at = {5, 6, kNeverSet};
    state.suppression_count = {4, 2, 0};

    const auto decayed =
        apply_decay(state, {DecayPolicy::Variant::PerNodeSuppression, 3}, 100);
    CHECK(decayed.negative_weights.values == std::vector<double>{1.0, 1.7, 1.0});
    CHECK(decayed.suppression_count == std::vector<std::int64_t>{0, 2, 0});
}

TEST_CASE("full reset by age waits for the oldest non-baseline node") {
    const Inventory inventory = abc_inventory();
    UserSessionState state = new_user_state("u1", inventory, 3);
    const Timestamp now = 50 * kSecondsPerDay;
    state.negative_weights.values = {1.2, 1.9, 1.0};
    state.weight_set_at = {now - 10 * kSecondsPerDay, now - 1 * kSecondsPerDay, kNeverSet};

    const auto reset = apply_decay(state, {DecayPolicy::Variant::FullResetByAge, 7}, now);
    CHECK(reset.negative_weights.values == std::vector<double>{1.0, 1.0, 1.0});

    state.weight_set_at = {now - 3 * kSecondsPerDay, now - 1 * kSecondsPerDay, kNeverSet};
    const auto kept = apply_decay(state, {DecayPolicy::Variant::FullResetByAge, 7}, now);
    CHECK(kept.negative_weights.values == std::vector<double>{1.2, 1.9, 1.0});
}

TEST_CASE("fresh state is a fixed point of every decay policy") {
    const Inventory inventory = abc_inventory();
    const UserSessionState fresh = new_user_state("u1", inventory, 3);
    const Timestamp now = 1'700'000'000;
    for (const auto variant :
         {DecayPolicy::Variant::PerNodeAge, DecayPolicy::Variant::PerNodeSuppression,
          DecayPolicy::Variant::FullResetByServes, DecayPolicy::Variant::FullResetByAge}) {
        CHECK(apply_decay(fresh, {variant, 5}, now) == fresh);
    }
}

TEST_CASE("record_suppressions counts pushed-out products") {
    const Inventory inventory = abc_inventory();
    const UserSessionState base = new_user_state("u1", inventory, 3);

    RecommendationList would{{"a", "b"}, {0.9, 0.8}, false};
    RecommendationList served{{"a", "c"}, {0.5, 0.4}, false};
    auto state = record_suppressions(base, would, served, inventory);
    CHECK(state.suppression_count == std::vector<std::int64_t>{0, 1, 0});

    state = record_suppressions(base, would, would, inventory);
    CHECK(state.suppression_count == std::vector<std::int64_t>{0, 0, 0});

    RecommendationList only_a{{"a"}, {0.9}, false};
    RecommendationList nothing{{}, {}, true};
    state = record_suppressions(base, only_a, nothing, inventory);
    CHECK(state.suppression_count == std::vector<std::int64_t>{1, 0, 0});
}

TEST_CASE("feedback_serve_cycle serves by relevance at baseline") {
    const Inventory inventory = abc_inventory();
    EngineConfig config;
    config.t = 2;
    const auto result = feedback_serve_cycle(new_user_state("u1", inventory, 3),
                                             relevance({0.9, 0.8, 0.1}), inventory, config, 0);
    CHECK(result.list.items == std::vector<ProductId>{"a", "b"});
    CHECK(result.state.serve_count == 1);
    CHECK(result.state.window.union_all() == std::set<ProductId>{"a", "b"});
}

TEST_CASE("feedback_serve_cycle suppresses a heavily penalized product") {
    const Inventory inventory = abc_inventory();
    EngineConfig config;
    config.t = 2;
    UserSessionState state = new_user_state("u1", inventory, 3);
    state.negative_weights.values[0] = 2.0;
    state.weight_set_at[0] = 0;

    const auto result =
        feedback_serve_cycle(state, relevance({0.9, 0.8, 0.1}), inventory, config, 0);
    CHECK(result.list.items == std::vector<ProductId>{"b", "c"});
    REQUIRE(result.list.scores.size() == 2);
    CHECK(result.list.scores[0] == doctest::Approx(-0.2));
    CHECK(result.list.scores[1] == doctest::Approx(-0.9));
    // "a" ranked top-2 by relevance alone but was pushed out.
    CHECK(result.state.suppression_count == std::vector<std::int64_t>{1, 0, 0});
}

TEST_CASE("feedback_serve_cycle is deterministic") {
    const Inventory inventory = abc_inventory();
    EngineConfig config;
    config.t = 2;
    UserSessionState state = new_user_state("u1", inventory, 3);
    state.negative_weights.values[1] = 1.25;
    state.weight_set_at[1] = 11;

    const auto first = feedback_serve_cycle(state, relevance({0.4, 0.9, 0.3}), inventory,
                                            config, 1000);
    const auto second = feedback_serve_cycle(state, relevance({0.4, 0.9, 0.3}), inventory,
                                             config, 1000);
    CHECK(first.list == second.list);
    CHECK(first.state == second.state);
}

TEST_CASE("feedback_serve_cycle excludes prioritized products by default") {
    const Inventory inventory = abc_inventory();
    EngineConfig config;
    config.t = 2;
    UserSessionState state = new_user_state("u1", inventory, 3);
    state.prioritized = {"a"};

    const auto excluded =
        feedback_serve_cycle(state, relevance({0.9, 0.8, 0.1}), inventory, config, 0);
    CHECK(excluded.list.items == std::vector<ProductId>{"b", "c"});

    config.exclude_prioritized = false;
    const auto kept =
        feedback_serve_cycle(state, relevance({0.9, 0.8, 0.1}), inventory, config, 0);
    CHECK(kept.list.items == std::vector<ProductId>{"a", "b"});
}

TEST_CASE("uniform weight shifts never change the served order") {
    Rng rng(4242);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 4 + static_cast<int>(rng.uniform_below(6));
        std::vector<Product> products;
        for (int i = 0; i < n; ++i) {
            products.push_back({"p" + std::to_string(i), "B", {}});
        }
        const Inventory inventory = build_inventory(std::move(products));

        std::vector<double> rel(n), nw(n);
        for (int i = 0; i < n; ++i) {
            rel[i] = rng.uniform01();
            nw[i] = 1.0 + rng.uniform01();
        }
        const double shift = rng.uniform01() * 5.0;
        std::vector<double> shifted = nw;
        for (double& w : shifted) w += shift;

        const auto base = serve_top_t(combine_scores(relevance(rel), weights(nw)), 3, {},
                                      inventory);
        const auto moved = serve_top_t(combine_scores(relevance(rel), weights(shifted)), 3, {},
                                       inventory);
        CHECK(base.items == moved.items);
    }
}

TEST_CASE("raising one product's weight never improves its rank") {
    Rng rng(515151);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 5;
        std::vector<Product> products;
        for (int i = 0; i < n; ++i) products.push_back({"p" + std::to_string(i), "B", {}});
        const Inventory inventory = build_inventory(std::move(products));

        std::vector<double> rel(n);
        for (double& r : rel) r = rng.uniform01();
        std::vector<double> nw(n, 1.0);

        const std::size_t target = rng.uniform_below(n);
        std::size_t previous_rank = 0;
        for (int step = 0; step < 6; ++step) {
            const auto list =
                serve_top_t(combine_scores(relevance(rel), weights(nw)), n, {}, inventory);
            const std::size_t rank = rank_of(list, "p" + std::to_string(target));
            if (step > 0) CHECK(rank >= previous_rank);
            previous_rank = rank;
            nw[target] += rng.uniform01();
        }
    }
}

TEST_CASE("decay restoration returns serving to pure relevance order") {
    Rng rng(909090);
    const Inventory inventory = abc_inventory();
    for (int trial = 0; trial < 20; ++trial) {
        UserSessionState state = new_user_state("u1", inventory, 3);
        std::vector<double> rel = {rng.uniform01(), rng.uniform01(), rng.uniform01()};
        Timestamp latest = 0;
        for (std::size_t i = 0; i < 3; ++i) {
            if (rng.bernoulli(0.7)) {
                state.negative_weights.values[i] = 1.0 + rng.uniform01() * 4.0;
                state.weight_set_at[i] = static_cast<Timestamp>(rng.uniform_below(1000));
                latest = std::max(latest, state.weight_set_at[i]);
            }
        }

        const Timestamp far_future = latest + 8 * kSecondsPerDay;
        const auto decayed =
            apply_decay(state, {DecayPolicy::Variant::PerNodeAge, 7}, far_future);
        CHECK(decayed.negative_weights.values == std::vector<double>{1.0, 1.0, 1.0});

        const auto with_weights = serve_top_t(
            combine_scores(relevance(rel), decayed.negative_weights), 3, {}, inventory);
        const auto pure =
            serve_top_t(ScoreVector{rel, ScoreKind::Final}, 3, {}, inventory);
        CHECK(with_weights.items == pure.items);
    }
}
