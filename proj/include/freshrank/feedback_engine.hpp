#pragma once

#include <cstdint>
#include <set>
#include <vector>

#include "freshrank/core_model.hpp"

namespace freshrank {

// Rule restoring NegativeWeights entries to baseline.
struct DecayPolicy {
    enum class Variant {
        PerNodeAge,         // node older than max_age_days -> baseline
        PerNodeSuppression, // node suppressed more than suppression_limit times -> baseline
        FullResetByServes,  // whole array after reset_after_serves serves
        FullResetByAge,     // whole array once the oldest non-baseline node ages out
    };

    Variant variant = Variant::PerNodeAge;
    std::int64_t parameter = 7;  // days or counts, per variant

    friend bool operator==(const DecayPolicy&, const DecayPolicy&) = default;
};

void validate(const DecayPolicy& policy);
const char* to_string(DecayPolicy::Variant variant);
std::optional<DecayPolicy::Variant> decay_variant_from_string(const std::string& name);

struct PenaltyConfig {
    double dwell_coefficient = 0.01;       // weight added per dwell second
    bool require_click_without_add = true; // penalize only clicked-but-not-added products

    friend bool operator==(const PenaltyConfig&, const PenaltyConfig&) = default;
};

void validate(const PenaltyConfig& config);

// Everything one serve cycle needs; mirrors the engine's config block.
struct EngineConfig {
    int t = 10;
    PenaltyConfig penalty;
    DecayPolicy decay;
    bool exclude_prioritized = true;

    friend bool operator==(const EngineConfig&, const EngineConfig&) = default;
};

void validate(const EngineConfig& config);

// final[i] = relevance[i] - negative_weights[i]; results may be negative.
ScoreVector combine_scores(const ScoreVector& relevance, const ScoreVector& negative_weights);

// The t highest-scoring non-excluded products, score descending, ties by
// ascending product id. Returns a shorter list with truncated=true when fewer
// than t candidates exist.
RecommendationList serve_top_t(const ScoreVector& final_scores, int t,
                               const std::set<ProductId>& excluded, const Inventory& inventory);

// Per-position dwell totals for products that were clicked (and, by default,
// not added to the priority list) within this event batch.
ScoreVector build_dwell_array(const std::vector<EventRecord>& events,
                              const UserSessionState& state, const Inventory& inventory,
                              const PenaltyConfig& config);

// negative_weights[i] += dwell_coefficient * dwell_array[i].
UserSessionState apply_penalty(UserSessionState state, const ScoreVector& dwell_array,
                               const PenaltyConfig& config, Timestamp now);

UserSessionState apply_decay(UserSessionState state, const DecayPolicy& policy, Timestamp now);

// Bumps suppression counters for products the weights pushed out of the list.
// Both lists must come from the same serve call over the given inventory.
UserSessionState record_suppressions(UserSessionState state,
                                     const RecommendationList& would_serve_without_weights,
                                     const RecommendationList& actually_served,
                                     const Inventory& inventory);

struct ServeResult {
    RecommendationList list;
    UserSessionState state;
};

// One full serve call: combine -> serve -> suppression bookkeeping -> window
// push -> decay check. Penalties are applied separately when events arrive.
ServeResult feedback_serve_cycle(UserSessionState state, const ScoreVector& relevance,
                                 const Inventory& inventory, const EngineConfig& config,
                                 Timestamp now);

}  // namespace freshrank
