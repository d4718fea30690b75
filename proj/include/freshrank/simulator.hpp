#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "freshrank/core_model.hpp"
#include "freshrank/feedback_engine.hpp"
#include "freshrank/freshness_metric.hpp"
#include "freshrank/rng.hpp"
#include "freshrank/shuffler.hpp"

namespace freshrank {

// Ground-truth behavior model for one simulated user.
struct SyntheticUser {
    UserId user_id;
    std::vector<double> preference;  // per inventory position, in [0, 1]
    double patience = 120.0;         // mean dwell scale, seconds
    double add_threshold = 0.8;      // preference at or above which a click becomes an add

    friend bool operator==(const SyntheticUser&, const SyntheticUser&) = default;
};

enum class Variant { Baseline, FeedbackLoop, Shuffle, MetricFeedback, FeedbackThenMetric };

const char* to_string(Variant variant);
std::optional<Variant> variant_from_string(const std::string& name);

struct ExperimentConfig {
    Variant variant = Variant::Baseline;
    int sessions = 30;
    int users = 50;
    std::uint64_t rng_seed = 1;

    double noise_sd = 0.05;
    double patience = 120.0;
    double add_threshold = 0.8;
    double view_position_bias = 1.0;  // view probability 1 / (1 + bias * position)
    std::int64_t session_gap_seconds = kSecondsPerDay;
    Timestamp start_timestamp = 1'600'000'000;

    // Synthetic inventory shape, used when no inventory file is supplied.
    int inventory_size = 200;
    int brand_count = 12;

    EngineConfig engine;
    MetricConfig metric;
    ShuffleConfig shuffle;

    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

void validate(const ExperimentConfig& config);

struct SessionRow {
    int call_index = 0;
    Variant variant = Variant::Baseline;
    UserId user_id;
    double freshness_sliding = 0.0;
    double freshness_alg3 = 0.0;
    int clicks = 0;
    int adds = 0;
};

struct ExperimentReport {
    std::string rng_algorithm;
    std::uint64_t rng_seed = 0;
    Variant variant = Variant::Baseline;
    int users = 0;
    int sessions = 0;

    double mean_freshness_sliding = 0.0;
    double mean_freshness_alg3 = 0.0;
    double mean_clicks_per_session = 0.0;
    double mean_adds_per_session = 0.0;
    double mean_unique_products_per_user = 0.0;
    std::vector<double> freshness_sliding_by_session;  // mean across users
    std::vector<double> freshness_alg3_by_session;

    std::vector<SessionRow> rows;  // one per (user, session)
};

// relevance[i] = clamp(preference[i] + gaussian(0, noise_sd), 0, 1).
ScoreVector synth_relevance(const SyntheticUser& user, double noise_sd, Rng& rng);

// Served / Viewed / Clicked / Dwell / AddedToPriorityList events for one serve.
// Dwell durations are exponential; clicked-but-not-added items dwell with mean
// patience * (1 - preference), so long dwell without an add tracks disinterest.
// The inventory maps served ids onto preference positions.
std::vector<EventRecord> simulate_interaction(const SyntheticUser& user,
                                              const RecommendationList& served,
                                              const Inventory& inventory, Rng& rng,
                                              Timestamp timestamp = 0,
                                              double view_position_bias = 1.0);

// Deterministic products p0000.. with brands assigned round-robin.
Inventory make_synthetic_inventory(int size, int brand_count);

// Runs one variant over the shared synthetic population. All random streams
// derive from (rng_seed, user, session, purpose), never from the variant, so
// reports for different variants under one seed are paired.
ExperimentReport run_experiment(const ExperimentConfig& config, const Inventory& inventory);

// The JSON document carries the aggregates and series; per-session rows go to
// the CSV. report_from_json restores everything the document holds.
nlohmann::json report_to_json(const ExperimentReport& report);
ExperimentReport report_from_json(const nlohmann::json& object);
std::string report_csv(const ExperimentReport& report);

// One-sided paired sign test: probability of >= wins successes out of
// wins + losses fair coin flips. Ties must be dropped by the caller.
double sign_test_p_value(int wins, int losses);

}  // namespace freshrank
