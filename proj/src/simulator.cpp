#include "freshrank/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <utility>

namespace freshrank {

namespace {

// Stream tags for derive_seed; keep stable or recorded replays break.
constexpr std::uint64_t kStreamUser = 1;
constexpr std::uint64_t kStreamRelevance = 2;
constexpr std::uint64_t kStreamInteraction = 3;
constexpr std::uint64_t kStreamShuffle = 4;

std::string zero_padded(std::int64_t value, int width) {
    std::string digits = std::to_string(value);
    if (static_cast<int>(digits.size()) < width) {
        digits.insert(0, static_cast<std::size_t>(width) - digits.size(), '0');
    }
    return digits;
}

int digits_needed(int max_value) {
    int digits = 1;
    while (max_value >= 10) {
        max_value /= 10;
        ++digits;
    }
    return digits;
}

// Positions ordered by score descending, ties by ascending product id,
// skipping excluded ids.
std::vector<std::size_t> ranked_positions(const std::vector<double>& scores,
                                          const Inventory& inventory,
                                          const std::set<ProductId>& excluded) {
    std::vector<std::size_t> order;
    order.reserve(inventory.size());
    for (std::size_t pos = 0; pos < inventory.size(); ++pos) {
        if (excluded.count(inventory.at(pos).product_id) == 0) order.push_back(pos);
    }
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return inventory.at(a).product_id < inventory.at(b).product_id;
    });
    return order;
}

}  // namespace

const char* to_string(Variant variant) {
    switch (variant) {
        case Variant::Baseline: return "baseline";
        case Variant::FeedbackLoop: return "feedback_loop";
        case Variant::Shuffle: return "shuffle";
        case Variant::MetricFeedback: return "metric_feedback";
        case Variant::FeedbackThenMetric: return "feedback_then_metric";
    }
    return "?";
}

std::optional<Variant> variant_from_string(const std::string& name) {
    if (name == "baseline") return Variant::Baseline;
    if (name == "feedback_loop") return Variant::FeedbackLoop;
    if (name == "shuffle") return Variant::Shuffle;
    if (name == "metric_feedback") return Variant::MetricFeedback;
    if (name == "feedback_then_metric") return Variant::FeedbackThenMetric;
    return std::nullopt;
}

void validate(const ExperimentConfig& config) {
    if (config.sessions < 1) throw ConfigError("sessions must be >= 1");
    if (config.users < 1) throw ConfigError("users must be >= 1");
    if (config.noise_sd < 0.0 || !std::isfinite(config.noise_sd)) {
        throw ConfigError("noise_sd must be >= 0");
    }
    if (!(config.patience > 0.0)) throw ConfigError("patience must be > 0");
    if (config.add_threshold < 0.0 || config.add_threshold > 1.0) {
        throw ConfigError("add_threshold must lie in [0, 1]");
    }
    if (config.view_position_bias < 0.0) throw ConfigError("view_position_bias must be >= 0");
    if (config.session_gap_seconds < 0) throw ConfigError("session_gap_seconds must be >= 0");
    if (config.inventory_size < 1) throw ConfigError("inventory_size must be >= 1");
    if (config.brand_count < 1) throw ConfigError("brand_count must be >= 1");
    validate(config.engine);
    validate(config.metric);
    validate(config.shuffle);
}

ScoreVector synth_relevance(const SyntheticUser& user, double noise_sd, Rng& rng) {
    if (noise_sd < 0.0) throw InvalidArgument("noise_sd must be >= 0");
    ScoreVector relevance;
    relevance.kind = ScoreKind::Relevance;
    relevance.values.reserve(user.preference.size());
    for (double preference : user.preference) {
        const double noisy = preference + rng.gaussian(0.0, noise_sd);
        relevance.values.push_back(std::clamp(noisy, 0.0, 1.0));
    }
    return relevance;
}

std::vector<EventRecord> simulate_interaction(const SyntheticUser& user,
                                              const RecommendationList& served,
                                              const Inventory& inventory, Rng& rng,
                                              Timestamp timestamp, double view_position_bias) {
    if (served.items.empty()) throw EmptyList();
    if (user.preference.size() != inventory.size()) {
        throw LengthMismatch(user.preference.size(), inventory.size());
    }

    std::vector<EventRecord> events;
    events.reserve(served.items.size() * 3);
    for (const ProductId& id : served.items) {
        events.push_back(EventRecord{user.user_id, id, EventKind::Served, std::nullopt,
                                     timestamp});
    }

    for (std::size_t list_pos = 0; list_pos < served.items.size(); ++list_pos) {
        const ProductId& id = served.items[list_pos];
        const double preference = user.preference[inventory.position_of(id)];

        const double view_probability =
            1.0 / (1.0 + view_position_bias * static_cast<double>(list_pos));
        if (!rng.bernoulli(view_probability)) continue;
        events.push_back(EventRecord{user.user_id, id, EventKind::Viewed, std::nullopt,
                                     timestamp});

        if (!rng.bernoulli(preference)) continue;
        events.push_back(EventRecord{user.user_id, id, EventKind::Clicked, std::nullopt,
                                     timestamp});

        // An added product is dwelled on in proportion to interest; a clicked
        // but unadded one in proportion to disinterest, which is what the
        // penalty hypothesis keys on.
        const bool will_add = preference >= user.add_threshold;
        const double dwell_mean =
            will_add ? user.patience * preference : user.patience * (1.0 - preference);
        events.push_back(EventRecord{user.user_id, id, EventKind::Dwell,
                                     rng.exponential(dwell_mean), timestamp});
        if (will_add) {
            events.push_back(EventRecord{user.user_id, id, EventKind::AddedToPriorityList,
                                         std::nullopt, timestamp});
        }
    }
    return events;
}

Inventory make_synthetic_inventory(int size, int brand_count) {
    if (size < 1) throw InvalidArgument("inventory size must be >= 1");
    if (brand_count < 1) throw InvalidArgument("brand count must be >= 1");
    const int id_width = std::max(4, digits_needed(size - 1));
    const int brand_width = std::max(2, digits_needed(brand_count - 1));
    std::vector<Product> products;
    products.reserve(size);
    for (int i = 0; i < size; ++i) {
        products.push_back(Product{"p" + zero_padded(i, id_width),
                                   "brand" + zero_padded(i % brand_count, brand_width),
                                   {}});
    }
    return build_inventory(std::move(products));
}

namespace {

SyntheticUser make_user(int index, std::size_t inventory_size, const ExperimentConfig& config) {
    SyntheticUser user;
    user.user_id = "u" + zero_padded(index, 4);
    user.patience = config.patience;
    user.add_threshold = config.add_threshold;
    Rng rng(derive_seed(config.rng_seed, kStreamUser, static_cast<std::uint64_t>(index)));
    user.preference.reserve(inventory_size);
    for (std::size_t i = 0; i < inventory_size; ++i) user.preference.push_back(rng.uniform01());
    return user;
}

struct UserRun {
    std::vector<SessionRow> rows;
    std::size_t unique_products = 0;
};

UserRun run_user(const ExperimentConfig& config, const Inventory& inventory,
                 const BrandMap& brands, int user_index) {
    const SyntheticUser user = make_user(user_index, inventory.size(), config);
    const auto seed = config.rng_seed;
    const auto u = static_cast<std::uint64_t>(user_index);

    UserSessionState state =
        new_user_state(user.user_id, inventory, config.metric.window_capacity);
    RecWindow plain_window{{}, config.metric.window_capacity};  // non-engine variants
    MetricHistory metric_history;  // drives metric variants, reports alg3 elsewhere
    std::set<ProductId> prioritized;
    std::set<ProductId> ever_served;

    const bool engine_variant = config.variant == Variant::FeedbackLoop ||
                                config.variant == Variant::FeedbackThenMetric;

    UserRun run;
    run.rows.reserve(config.sessions);

    for (int session = 0; session < config.sessions; ++session) {
        const Timestamp now =
            config.start_timestamp + config.session_gap_seconds * session;
        const auto s = static_cast<std::uint64_t>(session);

        Rng relevance_rng(derive_seed(seed, u, s, kStreamRelevance));
        const ScoreVector relevance = synth_relevance(user, config.noise_sd, relevance_rng);

        const std::set<ProductId> excluded =
            config.engine.exclude_prioritized ? prioritized : std::set<ProductId>{};

        const std::set<ProductId> sliding_history =
            engine_variant ? state.window.union_all() : plain_window.union_all();

        RecommendationList served;
        double freshness_alg3 = 0.0;

        switch (config.variant) {
            case Variant::Baseline: {
                ScoreVector as_final{relevance.values, ScoreKind::Final};
                served = serve_top_t(as_final, config.engine.t, excluded, inventory);
                break;
            }
            case Variant::Shuffle: {
                ScoreVector as_final{relevance.values, ScoreKind::Final};
                served = serve_top_t(as_final, config.engine.t, excluded, inventory);
                ShuffleConfig per_serve = config.shuffle;
                per_serve.rng_seed =
                    derive_seed(config.rng_seed ^ config.shuffle.rng_seed, u, s, kStreamShuffle);
                served = shuffle(served, per_serve, brands);
                break;
            }
            case Variant::FeedbackLoop: {
                state.prioritized = prioritized;
                ServeResult result =
                    feedback_serve_cycle(std::move(state), relevance, inventory,
                                         config.engine, now);
                served = std::move(result.list);
                state = std::move(result.state);
                break;
            }
            case Variant::MetricFeedback:
            case Variant::FeedbackThenMetric: {
                std::vector<double> ranking_scores = relevance.values;
                if (config.variant == Variant::FeedbackThenMetric) {
                    const ScoreVector final_scores =
                        combine_scores(relevance, state.negative_weights);
                    ranking_scores = final_scores.values;
                }
                const auto order = ranked_positions(ranking_scores, inventory, excluded);
                std::vector<ProductId> candidates;
                std::vector<double> candidate_scores;
                candidates.reserve(order.size());
                candidate_scores.reserve(order.size());
                for (std::size_t pos : order) {
                    candidates.push_back(inventory.at(pos).product_id);
                    candidate_scores.push_back(ranking_scores[pos]);
                }
                MetricServeResult result =
                    metric_feedback_recommend(candidates, std::move(metric_history),
                                              config.metric, config.engine.t,
                                              candidate_scores);
                served = std::move(result.list);
                metric_history = std::move(result.history);
                freshness_alg3 = result.achieved_freshness;
                if (config.variant == Variant::FeedbackThenMetric) {
                    state.window = push_window(std::move(state.window), served.as_set());
                    state.serve_count += 1;
                    state = apply_decay(std::move(state), config.engine.decay, now);
                }
                break;
            }
        }

        const double freshness_sliding = compute_freshness(served, sliding_history);
        const bool metric_variant = config.variant == Variant::MetricFeedback ||
                                    config.variant == Variant::FeedbackThenMetric;
        if (!metric_variant) {
            freshness_alg3 = compute_freshness(served, metric_history.prod_rec_till_now);
            metric_history = update_metric_history(std::move(metric_history), served,
                                                   config.metric.max_decay_count);
        }
        if (!engine_variant) {
            // The serve cycle pushes its own window; the other variants track
            // the sliding history here.
            plain_window = push_window(std::move(plain_window), served.as_set());
        }

        Rng interaction_rng(derive_seed(seed, u, s, kStreamInteraction));
        const std::vector<EventRecord> events = simulate_interaction(
            user, served, inventory, interaction_rng, now, config.view_position_bias);

        int clicks = 0;
        int adds = 0;
        for (const EventRecord& event : events) {
            switch (event.event_kind) {
                case EventKind::Clicked:
                    ++clicks;
                    break;
                case EventKind::AddedToPriorityList:
                case EventKind::Purchased:
                    ++adds;
                    if (event.product_id) prioritized.insert(*event.product_id);
                    break;
                default:
                    break;
            }
        }

        if (engine_variant) {
            state.prioritized = prioritized;
            const ScoreVector dwell =
                build_dwell_array(events, state, inventory, config.engine.penalty);
            state = apply_penalty(std::move(state), dwell, config.engine.penalty, now);
        }

        for (const ProductId& id : served.items) ever_served.insert(id);

        SessionRow row;
        row.call_index = session;
        row.variant = config.variant;
        row.user_id = user.user_id;
        row.freshness_sliding = freshness_sliding;
        row.freshness_alg3 = freshness_alg3;
        row.clicks = clicks;
        row.adds = adds;
        run.rows.push_back(row);
    }

    run.unique_products = ever_served.size();
    return run;
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& config, const Inventory& inventory) {
    validate(config);

    const BrandMap brands = brand_map(inventory);
    ExperimentReport report;
    report.rng_algorithm = Rng::kAlgorithmId;
    report.rng_seed = config.rng_seed;
    report.variant = config.variant;
    report.users = config.users;
    report.sessions = config.sessions;
    report.freshness_sliding_by_session.assign(config.sessions, 0.0);
    report.freshness_alg3_by_session.assign(config.sessions, 0.0);

    double total_unique = 0.0;
    for (int user_index = 0; user_index < config.users; ++user_index) {
        UserRun run = run_user(config, inventory, brands, user_index);
        total_unique += static_cast<double>(run.unique_products);
        for (const SessionRow& row : run.rows) {
            report.mean_freshness_sliding += row.freshness_sliding;
            report.mean_freshness_alg3 += row.freshness_alg3;
            report.mean_clicks_per_session += row.clicks;
            report.mean_adds_per_session += row.adds;
            report.freshness_sliding_by_session[row.call_index] += row.freshness_sliding;
            report.freshness_alg3_by_session[row.call_index] += row.freshness_alg3;
        }
        report.rows.insert(report.rows.end(), run.rows.begin(), run.rows.end());
    }

    const double cells = static_cast<double>(config.users) * config.sessions;
    report.mean_freshness_sliding /= cells;
    report.mean_freshness_alg3 /= cells;
    report.mean_clicks_per_session /= cells;
    report.mean_adds_per_session /= cells;
    report.mean_unique_products_per_user = total_unique / config.users;
    for (double& value : report.freshness_sliding_by_session) value /= config.users;
    for (double& value : report.freshness_alg3_by_session) value /= config.users;
    return report;
}

nlohmann::json report_to_json(const ExperimentReport& report) {
    nlohmann::json object;
    object["rng_algorithm"] = report.rng_algorithm;
    object["rng_seed"] = report.rng_seed;
    object["variant"] = to_string(report.variant);
    object["users"] = report.users;
    object["sessions"] = report.sessions;
    object["mean_freshness_sliding"] = report.mean_freshness_sliding;
    object["mean_freshness_alg3"] = report.mean_freshness_alg3;
    object["mean_clicks_per_session"] = report.mean_clicks_per_session;
    object["mean_adds_per_session"] = report.mean_adds_per_session;
    object["mean_unique_products_per_user"] = report.mean_unique_products_per_user;
    object["freshness_sliding_by_session"] = report.freshness_sliding_by_session;
    object["freshness_alg3_by_session"] = report.freshness_alg3_by_session;
    return object;
}

ExperimentReport report_from_json(const nlohmann::json& object) {
    ExperimentReport report;
    try {
        report.rng_algorithm = object.at("rng_algorithm").get<std::string>();
        report.rng_seed = object.at("rng_seed").get<std::uint64_t>();
        const auto variant = variant_from_string(object.at("variant").get<std::string>());
        if (!variant) throw ValidationError("unknown report variant");
        report.variant = *variant;
        report.users = object.at("users").get<int>();
        report.sessions = object.at("sessions").get<int>();
        report.mean_freshness_sliding = object.at("mean_freshness_sliding").get<double>();
        report.mean_freshness_alg3 = object.at("mean_freshness_alg3").get<double>();
        report.mean_clicks_per_session = object.at("mean_clicks_per_session").get<double>();
        report.mean_adds_per_session = object.at("mean_adds_per_session").get<double>();
        report.mean_unique_products_per_user =
            object.at("mean_unique_products_per_user").get<double>();
        report.freshness_sliding_by_session =
            object.at("freshness_sliding_by_session").get<std::vector<double>>();
        report.freshness_alg3_by_session =
            object.at("freshness_alg3_by_session").get<std::vector<double>>();
    } catch (const nlohmann::json::exception& error) {
        throw ValidationError(std::string("bad experiment report: ") + error.what());
    }
    return report;
}

std::string report_csv(const ExperimentReport& report) {
    std::string csv = "call_index,variant,user_id,freshness_sliding,freshness_alg3,clicks,adds\n";
    char line[256];
    for (const SessionRow& row : report.rows) {
        std::snprintf(line, sizeof(line), "%d,%s,%s,%.17g,%.17g,%d,%d\n", row.call_index,
                      to_string(row.variant), row.user_id.c_str(), row.freshness_sliding,
                      row.freshness_alg3, row.clicks, row.adds);
        csv += line;
    }
    return csv;
}

double sign_test_p_value(int wins, int losses) {
    if (wins < 0 || losses < 0) throw InvalidArgument("sign test counts must be >= 0");
    const int n = wins + losses;
    if (n == 0) return 1.0;
    long double tail = 0.0L;
    long double coefficient = 1.0L;  // C(n, 0)
    for (int k = 0; k <= n; ++k) {
        if (k >= wins) tail += coefficient;
        coefficient = coefficient * (n - k) / (k + 1);
    }
    return static_cast<double>(tail / std::pow(2.0L, n));
}

}  // namespace freshrank
