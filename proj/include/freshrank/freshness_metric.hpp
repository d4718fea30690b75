#pragma once

#include <set>
#include <string>
#include <vector>

#include "freshrank/core_model.hpp"

namespace freshrank {

struct MetricConfig {
    int window_capacity = 5;          // k of the sliding A_k
    double freshness_threshold = 0.7; // in [0, 1]
    int max_decay_count = 10;

    friend bool operator==(const MetricConfig&, const MetricConfig&) = default;
};

void validate(const MetricConfig& config);

// Flat accumulated history with count-based reset (as opposed to the sliding
// RecWindow, which is kept for reporting).
struct MetricHistory {
    std::set<ProductId> prod_rec_till_now;
    int count = 0;

    friend bool operator==(const MetricHistory&, const MetricHistory&) = default;
};

// |items \ history| / t. Throws EmptyList when the list has no items.
double compute_freshness(const RecommendationList& rec_list,
                         const std::set<ProductId>& history);

// Post-serve history update: below max_decay_count the served items are
// accumulated and the count bumps; at the limit the history resets to empty.
MetricHistory update_metric_history(MetricHistory history, const RecommendationList& served,
                                    int max_decay_count);

struct MetricServeResult {
    RecommendationList list;
    double achieved_freshness = 0.0;
    int replacements_made = 0;
    bool exhausted = false;  // candidates ran out below the threshold
    MetricHistory history;   // state after the post-serve update
};

// Threshold-driven re-ranking: starts from the top-t prefix of the ranked
// candidates and, while freshness is below the threshold, swaps the least
// relevant already-seen list member for the next most relevant unused
// candidate. Returns the best list achieved (earliest at the top freshness),
// then applies the count-based history update: below max_decay_count the
// served set is accumulated, otherwise the history resets to empty.
//
// `relevance` optionally parallels `ranked_candidates` and only feeds the
// returned list's scores.
MetricServeResult metric_feedback_recommend(const std::vector<ProductId>& ranked_candidates,
                                            MetricHistory history, const MetricConfig& config,
                                            int t,
                                            const std::vector<double>& relevance = {});

// One JSON object per serve call in reports.
struct MetricReportRecord {
    UserId user_id;
    int call_index = 0;
    double freshness = 0.0;
    std::string window_mode;  // "alg3_set" or "sliding_k"
    int replacements_made = 0;
    bool exhausted = false;

    friend bool operator==(const MetricReportRecord&, const MetricReportRecord&) = default;
};

}  // namespace freshrank
