#include "freshrank/freshness_metric.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>
#include <utility>

namespace freshrank {

void validate(const MetricConfig& config) {
    if (config.window_capacity < 1) throw ConfigError("window_capacity must be >= 1");
    if (config.freshness_threshold < 0.0 || config.freshness_threshold > 1.0 ||
        !std::isfinite(config.freshness_threshold)) {
        throw ConfigError("freshness_threshold must lie in [0, 1]");
    }
    if (config.max_decay_count < 1) throw ConfigError("max_decay_count must be >= 1");
}

double compute_freshness(const RecommendationList& rec_list,
                         const std::set<ProductId>& history) {
    if (rec_list.items.empty()) throw EmptyList();
    std::size_t unseen = 0;
    for (const ProductId& id : rec_list.items) {
        if (history.count(id) == 0) ++unseen;
    }
    return static_cast<double>(unseen) / static_cast<double>(rec_list.items.size());
}

MetricServeResult metric_feedback_recommend(const std::vector<ProductId>& ranked_candidates,
                                            MetricHistory history, const MetricConfig& config,
                                            int t, const std::vector<double>& relevance) {
    validate(config);
    if (t < 1) throw InvalidArgument("t must be >= 1, got " + std::to_string(t));
    if (!relevance.empty() && relevance.size() != ranked_candidates.size()) {
        throw LengthMismatch(relevance.size(), ranked_candidates.size());
    }
    {
        std::unordered_set<ProductId> seen_ids;
        for (const ProductId& id : ranked_candidates) {
            if (!seen_ids.insert(id).second) throw DuplicateProductId(id);
        }
    }

    const std::size_t list_len =
        std::min<std::size_t>(ranked_candidates.size(), static_cast<std::size_t>(t));
    if (list_len == 0) throw EmptyList();

    // rank_in_list[i] holds an index into ranked_candidates.
    std::vector<std::size_t> rank_in_list(list_len);
    for (std::size_t i = 0; i < list_len; ++i) rank_in_list[i] = i;

    const auto is_seen = [&](std::size_t rank) {
        return history.prod_rec_till_now.count(ranked_candidates[rank]) != 0;
    };
    const auto freshness_of = [&](const std::vector<std::size_t>& list) {
        std::size_t unseen = 0;
        for (std::size_t rank : list) {
            if (!is_seen(rank)) ++unseen;
        }
        return static_cast<double>(unseen) / static_cast<double>(list.size());
    };

    double current = freshness_of(rank_in_list);
    std::vector<std::size_t> best_list = rank_in_list;
    double best = current;
    int replacements = 0;
    std::size_t next_candidate = list_len;

    while (current < config.freshness_threshold && next_candidate < ranked_candidates.size()) {
        // Victim: the least relevant member already in the history.
        std::size_t victim = list_len;
        for (std::size_t i = 0; i < list_len; ++i) {
            if (!is_seen(rank_in_list[i])) continue;
            if (victim == list_len || rank_in_list[i] > rank_in_list[victim]) victim = i;
        }
        if (victim == list_len) break;  // fully fresh yet below threshold: t too small

        rank_in_list[victim] = next_candidate++;
        ++replacements;
        current = freshness_of(rank_in_list);
        if (current > best) {
            best = current;
            best_list = rank_in_list;
        }
    }

    std::sort(best_list.begin(), best_list.end());  // present in relevance order

    MetricServeResult result;
    result.achieved_freshness = best;
    result.replacements_made = replacements;
    result.exhausted = best < config.freshness_threshold;
    result.list.truncated = list_len < static_cast<std::size_t>(t);
    result.list.items.reserve(list_len);
    result.list.scores.reserve(list_len);
    for (std::size_t rank : best_list) {
        result.list.items.push_back(ranked_candidates[rank]);
        result.list.scores.push_back(relevance.empty() ? 0.0 : relevance[rank]);
    }

    result.history =
        update_metric_history(std::move(history), result.list, config.max_decay_count);
    return result;
}

MetricHistory update_metric_history(MetricHistory history, const RecommendationList& served,
                                    int max_decay_count) {
    if (history.count < max_decay_count) {
        for (const ProductId& id : served.items) history.prod_rec_till_now.insert(id);
        history.count += 1;
    } else {
        history.prod_rec_till_now.clear();
        history.count = 0;
    }
    return history;
}

}  // namespace freshrank
