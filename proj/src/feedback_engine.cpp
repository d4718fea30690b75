#include "freshrank/feedback_engine.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>
#include <utility>

namespace freshrank {

void validate(const DecayPolicy& policy) {
    if (policy.parameter < 1) {
        throw ConfigError("decay parameter must be >= 1, got " +
                          std::to_string(policy.parameter));
    }
}

const char* to_string(DecayPolicy::Variant variant) {
    switch (variant) {
        case DecayPolicy::Variant::PerNodeAge: return "per_node_age";
        case DecayPolicy::Variant::PerNodeSuppression: return "per_node_suppression";
        case DecayPolicy::Variant::FullResetByServes: return "full_reset_by_serves";
        case DecayPolicy::Variant::FullResetByAge: return "full_reset_by_age";
    }
    return "?";
}

std::optional<DecayPolicy::Variant> decay_variant_from_string(const std::string& name) {
    if (name == "per_node_age") return DecayPolicy::Variant::PerNodeAge;
    if (name == "per_node_suppression") return DecayPolicy::Variant::PerNodeSuppression;
    if (name == "full_reset_by_serves") return DecayPolicy::Variant::FullResetByServes;
    if (name == "full_reset_by_age") return DecayPolicy::Variant::FullResetByAge;
    return std::nullopt;
}

void validate(const PenaltyConfig& config) {
    if (!(config.dwell_coefficient > 0.0) || !std::isfinite(config.dwell_coefficient)) {
        throw ConfigError("dwell_coefficient must be a positive finite number");
    }
}

void validate(const EngineConfig& config) {
    if (config.t < 1) throw ConfigError("t must be >= 1");
    validate(config.penalty);
    validate(config.decay);
}

ScoreVector combine_scores(const ScoreVector& relevance, const ScoreVector& negative_weights) {
    if (relevance.kind != ScoreKind::Relevance) {
        throw KindMismatch("expected relevance scores, got " +
                           std::string(to_string(relevance.kind)));
    }
    if (negative_weights.kind != ScoreKind::NegativeWeights) {
        throw KindMismatch("expected negative weights, got " +
                           std::string(to_string(negative_weights.kind)));
    }
    if (relevance.size() != negative_weights.size()) {
        throw LengthMismatch(relevance.size(), negative_weights.size());
    }
    ScoreVector final_scores;
    final_scores.kind = ScoreKind::Final;
    final_scores.values.resize(relevance.size());
    for (std::size_t i = 0; i < relevance.size(); ++i) {
        final_scores.values[i] = relevance.values[i] - negative_weights.values[i];
    }
    return final_scores;
}

RecommendationList serve_top_t(const ScoreVector& final_scores, int t,
                               const std::set<ProductId>& excluded, const Inventory& inventory) {
    if (t < 1) throw InvalidArgument("t must be >= 1, got " + std::to_string(t));
    if (final_scores.size() != inventory.size()) {
        throw LengthMismatch(final_scores.size(), inventory.size());
    }
    for (const ProductId& id : excluded) {
        if (!inventory.contains(id)) throw UnknownProduct(id);
    }

    std::vector<std::size_t> candidates;
    candidates.reserve(inventory.size());
    for (std::size_t pos = 0; pos < inventory.size(); ++pos) {
        if (excluded.count(inventory.at(pos).product_id) == 0) candidates.push_back(pos);
    }
    std::sort(candidates.begin(), candidates.end(), [&](std::size_t a, std::size_t b) {
        if (final_scores.values[a] != final_scores.values[b]) {
            return final_scores.values[a] > final_scores.values[b];
        }
        return inventory.at(a).product_id < inventory.at(b).product_id;
    });

    const std::size_t take = std::min<std::size_t>(candidates.size(), static_cast<std::size_t>(t));
    RecommendationList list;
    list.items.reserve(take);
    list.scores.reserve(take);
    for (std::size_t i = 0; i < take; ++i) {
        list.items.push_back(inventory.at(candidates[i]).product_id);
        list.scores.push_back(final_scores.values[candidates[i]]);
    }
    list.truncated = take < static_cast<std::size_t>(t);
    return list;
}

ScoreVector build_dwell_array(const std::vector<EventRecord>& events,
                              const UserSessionState& state, const Inventory& inventory,
                              const PenaltyConfig& config) {
    std::vector<double> dwell_sums(inventory.size(), 0.0);
    std::vector<bool> clicked(inventory.size(), false);
    std::vector<bool> added(inventory.size(), false);

    for (const EventRecord& event : events) {
        if (event.user_id != state.user_id) {
            throw ForeignUserEvent(state.user_id, event.user_id);
        }
        if (!event.product_id) continue;
        const std::size_t pos = inventory.position_of(*event.product_id);
        switch (event.event_kind) {
            case EventKind::Clicked:
                clicked[pos] = true;
                break;
            case EventKind::AddedToPriorityList:
                added[pos] = true;
                break;
            case EventKind::Dwell:
                dwell_sums[pos] += event.dwell_seconds.value_or(0.0);
                break;
            default:
                break;
        }
    }

    ScoreVector dwell;
    dwell.kind = ScoreKind::NegativeWeights;
    dwell.values.resize(inventory.size(), 0.0);
    for (std::size_t pos = 0; pos < inventory.size(); ++pos) {
        const bool penalize =
            clicked[pos] && (!config.require_click_without_add || !added[pos]);
        if (penalize) dwell.values[pos] = dwell_sums[pos];
    }
    return dwell;
}

UserSessionState apply_penalty(UserSessionState state, const ScoreVector& dwell_array,
                               const PenaltyConfig& config, Timestamp now) {
    if (dwell_array.size() != state.negative_weights.size()) {
        throw LengthMismatch(dwell_array.size(), state.negative_weights.size());
    }
    for (std::size_t i = 0; i < dwell_array.size(); ++i) {
        if (dwell_array.values[i] > 0.0) {
            state.negative_weights.values[i] += config.dwell_coefficient * dwell_array.values[i];
            state.weight_set_at[i] = now;
        }
    }
    return state;
}

namespace {

// Age of a node's weight; baseline nodes read as age zero.
std::int64_t weight_age_seconds(Timestamp set_at, Timestamp now) {
    if (set_at == kNeverSet) return 0;
    return now >= set_at ? now - set_at : 0;
}

void reset_node(UserSessionState& state, std::size_t pos) {
    state.negative_weights.values[pos] = kBaselineWeight;
    state.weight_set_at[pos] = kNeverSet;
}

void reset_all_weights(UserSessionState& state) {
    for (std::size_t pos = 0; pos < state.negative_weights.size(); ++pos) {
        reset_node(state, pos);
    }
}

}  // namespace

UserSessionState apply_decay(UserSessionState state, const DecayPolicy& policy, Timestamp now) {
    validate(policy);
    switch (policy.variant) {
        case DecayPolicy::Variant::PerNodeAge: {
            const std::int64_t max_age = policy.parameter * kSecondsPerDay;
            for (std::size_t pos = 0; pos < state.negative_weights.size(); ++pos) {
                if (weight_age_seconds(state.weight_set_at[pos], now) > max_age) {
                    reset_node(state, pos);
                }
            }
            break;
        }
        case DecayPolicy::Variant::PerNodeSuppression: {
            for (std::size_t pos = 0; pos < state.negative_weights.size(); ++pos) {
                if (state.suppression_count[pos] > policy.parameter) {
                    reset_node(state, pos);
                    state.suppression_count[pos] = 0;
                }
            }
            break;
        }
        case DecayPolicy::Variant::FullResetByServes: {
            if (state.serve_count >= policy.parameter) {
                reset_all_weights(state);
                state.serve_count = 0;
            }
            break;
        }
        case DecayPolicy::Variant::FullResetByAge: {
            Timestamp oldest = kNeverSet;
            for (Timestamp set_at : state.weight_set_at) {
                if (set_at == kNeverSet) continue;
                if (oldest == kNeverSet || set_at < oldest) oldest = set_at;
            }
            if (oldest != kNeverSet &&
                weight_age_seconds(oldest, now) > policy.parameter * kSecondsPerDay) {
                reset_all_weights(state);
            }
            break;
        }
    }
    return state;
}

UserSessionState record_suppressions(UserSessionState state,
                                     const RecommendationList& would_serve_without_weights,
                                     const RecommendationList& actually_served,
                                     const Inventory& inventory) {
    std::unordered_set<ProductId> served(actually_served.items.begin(),
                                         actually_served.items.end());
    for (const ProductId& id : would_serve_without_weights.items) {
        if (served.count(id) == 0) {
            state.suppression_count[inventory.position_of(id)] += 1;
        }
    }
    return state;
}

ServeResult feedback_serve_cycle(UserSessionState state, const ScoreVector& relevance,
                                 const Inventory& inventory, const EngineConfig& config,
                                 Timestamp now) {
    validate(config);
    if (relevance.size() != inventory.size()) {
        throw LengthMismatch(relevance.size(), inventory.size());
    }

    const std::set<ProductId> excluded =
        config.exclude_prioritized ? state.prioritized : std::set<ProductId>{};

    ScoreVector final_scores = combine_scores(relevance, state.negative_weights);
    RecommendationList served = serve_top_t(final_scores, config.t, excluded, inventory);

    // Relevance-only ranking, for suppression bookkeeping.
    ScoreVector relevance_as_final{relevance.values, ScoreKind::Final};
    RecommendationList unweighted = serve_top_t(relevance_as_final, config.t, excluded, inventory);
    state = record_suppressions(std::move(state), unweighted, served, inventory);

    state.window = push_window(std::move(state.window), served.as_set());
    state.serve_count += 1;
    state = apply_decay(std::move(state), config.decay, now);

    return ServeResult{std::move(served), std::move(state)};
}

}  // namespace freshrank
