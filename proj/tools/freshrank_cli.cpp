// freshrank command line: replay recorded event logs, run offline A/B
// simulations, score logs with the sliding freshness metric, demo the
// brand-aware shuffle, and inspect persisted user state.

#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "freshrank/config.hpp"
#include "freshrank/json_io.hpp"
#include "freshrank/replay.hpp"
#include "freshrank/shuffler.hpp"
#include "freshrank/simulator.hpp"

namespace {

using namespace freshrank;
using nlohmann::json;

int cmd_replay(const std::string& events_path, const std::string& state_dir,
               const std::string& config_path, bool lenient, const std::string& out_path) {
    const AppConfig config = load_config(config_path);
    const Inventory inventory = inventory_from_config(config);
    const ParseMode mode = lenient ? ParseMode::Lenient : ParseMode::Strict;

    const IngestResult ingest = ingest_events(events_path, mode);
    StateMap states = load_states(state_dir);
    const ReplayResult result = replay(ingest.events, states, inventory, config);
    save_states(state_dir, states);

    json report;
    report["events"] = ingest.events.size();
    report["skipped_lines"] = ingest.skipped;
    report["users"] = states.size();
    json records = json::array();
    for (const MetricReportRecord& record : result.records) {
        records.push_back(metric_record_to_json(record));
    }
    report["records"] = records;

    const std::string text = report.dump(2) + "\n";
    if (out_path.empty()) {
        std::cout << text;
    } else {
        write_text_file(out_path, text);
        std::cout << "replayed " << ingest.events.size() << " events ("
                  << result.records.size() << " serve calls, " << ingest.skipped
                  << " lines skipped) -> " << out_path << "\n";
    }
    return 0;
}

int cmd_simulate(const std::string& config_path, const std::string& out_path,
                 const std::string& csv_path, std::uint64_t seed, bool seed_given) {
    AppConfig config = load_config(config_path);
    if (seed_given) config.experiment.rng_seed = seed;
    const Inventory inventory = inventory_from_config(config);

    const ExperimentReport report = run_experiment(config.experiment, inventory);
    write_text_file(out_path, report_to_json(report).dump(2) + "\n");
    if (!csv_path.empty()) write_text_file(csv_path, report_csv(report));

    std::cout << to_string(report.variant) << ": mean sliding freshness "
              << report.mean_freshness_sliding << ", mean alg3 freshness "
              << report.mean_freshness_alg3 << " -> " << out_path << "\n";
    return 0;
}

int cmd_metrics(const std::string& log_path, int window_capacity, bool lenient,
                const std::string& out_path) {
    if (window_capacity < 1) throw InvalidWindowCapacity(window_capacity);
    const ParseMode mode = lenient ? ParseMode::Lenient : ParseMode::Strict;
    const IngestResult ingest = ingest_events(log_path, mode);

    // Serve runs are per user: group first so interleaved logs batch the same
    // way replay does (a run is a contiguous stretch of Served events within
    // one user's sequence).
    std::vector<UserId> user_order;
    std::map<UserId, std::vector<const EventRecord*>> per_user;
    for (const EventRecord& event : ingest.events) {
        auto [it, inserted] = per_user.try_emplace(event.user_id);
        if (inserted) user_order.push_back(event.user_id);
        it->second.push_back(&event);
    }

    std::string lines;
    for (const UserId& user : user_order) {
        RecWindow window{{}, window_capacity};
        int call_index = 0;
        const auto& events = per_user[user];
        for (std::size_t i = 0; i < events.size();) {
            if (events[i]->event_kind != EventKind::Served) {
                ++i;
                continue;
            }
            std::set<ProductId> served;
            while (i < events.size() && events[i]->event_kind == EventKind::Served) {
                if (events[i]->product_id) served.insert(*events[i]->product_id);
                ++i;
            }
            if (served.empty()) continue;

            RecommendationList list;
            list.items.assign(served.begin(), served.end());
            list.scores.assign(list.items.size(), 0.0);

            MetricReportRecord record;
            record.user_id = user;
            record.call_index = call_index++;
            record.freshness = compute_freshness(list, window.union_all());
            record.window_mode = "sliding_k";
            lines += metric_record_to_json(record).dump() + "\n";

            window = push_window(std::move(window), std::move(served));
        }
    }

    if (out_path.empty()) {
        std::cout << lines;
    } else {
        write_text_file(out_path, lines);
    }
    return 0;
}

int cmd_shuffle_demo(const std::string& list_path, int p, std::uint64_t seed,
                     const std::string& out_path) {
    json parsed = json::parse(read_text_file(list_path), nullptr, false);
    if (parsed.is_discarded()) throw ValidationError("product list is malformed JSON");
    const std::vector<Product> products = products_from_json(parsed);
    const Inventory inventory = build_inventory(products);

    RecommendationList list;
    for (const Product& product : products) {
        list.items.push_back(product.product_id);
        list.scores.push_back(0.0);
    }

    ShuffleConfig config{p, seed};
    const RecommendationList shuffled = shuffle(list, config, brand_map(inventory));

    json output;
    output["rng_algorithm"] = Rng::kAlgorithmId;
    output["rng_seed"] = seed;
    output["partition_length"] = p;
    output["items"] = shuffled.items;
    const std::string text = output.dump(2) + "\n";
    if (out_path.empty()) {
        std::cout << text;
    } else {
        write_text_file(out_path, text);
    }
    return 0;
}

int cmd_state_show(const std::string& state_dir, const std::string& user_id) {
    const auto state = load_state(state_dir, user_id);
    if (!state) throw ValidationError("no snapshot for user '" + user_id + "'");
    std::cout << serialize_state(*state);
    return 0;
}

int cmd_state_reset(const std::string& state_dir, const std::string& user_id) {
    const auto state = load_state(state_dir, user_id);
    if (!state) throw ValidationError("no snapshot for user '" + user_id + "'");
    UserSessionState fresh;
    fresh.user_id = state->user_id;
    fresh.negative_weights =
        ScoreVector{std::vector<double>(state->negative_weights.size(), kBaselineWeight),
                    ScoreKind::NegativeWeights};
    fresh.weight_set_at.assign(state->weight_set_at.size(), kNeverSet);
    fresh.suppression_count.assign(state->suppression_count.size(), 0);
    fresh.window.capacity = state->window.capacity;
    save_state(state_dir, fresh);
    std::cout << "reset state for user '" << user_id << "'\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"freshness post-processing for recommender outputs"};
    app.require_subcommand(1);
    app.fallthrough();  // --strict/--lenient may follow the subcommand

    bool lenient = false;
    app.add_flag("--lenient,!--strict", lenient,
                 "skip malformed event lines instead of failing (default: strict)");

    std::string events_path, state_dir, config_path, out_path, csv_path, list_path, user_id;
    std::uint64_t seed = 0;
    int window_capacity = 5;
    int partition_length = 5;

    auto* replay_cmd = app.add_subcommand("replay", "replay an event log into user states");
    replay_cmd->add_option("--events", events_path, "line-delimited JSON event log")
        ->required();
    replay_cmd->add_option("--state-dir", state_dir, "directory of user state snapshots")
        ->required();
    replay_cmd->add_option("--config", config_path, "config file")->required();
    replay_cmd->add_option("--out", out_path, "write the metric report here (default stdout)");

    auto* simulate_cmd = app.add_subcommand("simulate", "run the offline A/B simulator");
    simulate_cmd->add_option("--config", config_path, "config file")->required();
    simulate_cmd->add_option("--out", out_path, "experiment report JSON")->required();
    simulate_cmd->add_option("--csv", csv_path, "optional per-session CSV");
    auto* seed_option =
        simulate_cmd->add_option("--seed", seed, "override ExperimentConfig.rng_seed");

    auto* metrics_cmd =
        app.add_subcommand("metrics", "sliding-window freshness for a recorded log");
    metrics_cmd->add_option("--log", events_path, "line-delimited JSON event log")->required();
    metrics_cmd->add_option("--window-capacity", window_capacity, "sliding window size (k)")
        ->required();
    metrics_cmd->add_option("--out", out_path, "write records here (default stdout)");

    auto* shuffle_cmd = app.add_subcommand("shuffle-demo", "brand-aware shuffle of a list");
    shuffle_cmd->add_option("--list", list_path, "JSON array of {id, brand} products")
        ->required();
    shuffle_cmd->add_option("--p", partition_length, "partition length")->required();
    shuffle_cmd->add_option("--seed", seed, "rng seed")->required();
    shuffle_cmd->add_option("--out", out_path, "write the shuffled list here (default stdout)");

    auto* state_cmd = app.add_subcommand("state", "inspect or reset a user state snapshot");
    state_cmd->require_subcommand(1);
    auto* show_cmd = state_cmd->add_subcommand("show", "print a user's snapshot");
    show_cmd->add_option("--user", user_id, "user id")->required();
    show_cmd->add_option("--state-dir", state_dir, "snapshot directory")->required();
    auto* reset_cmd = state_cmd->add_subcommand("reset", "reset a user to baseline");
    reset_cmd->add_option("--user", user_id, "user id")->required();
    reset_cmd->add_option("--state-dir", state_dir, "snapshot directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& error) {
        app.exit(error);
        return error.get_exit_code() == 0 ? 0 : 1;
    }

    try {
        if (*replay_cmd) {
            return cmd_replay(events_path, state_dir, config_path, lenient, out_path);
        }
        if (*simulate_cmd) {
            return cmd_simulate(config_path, out_path, csv_path, seed, seed_option->count() > 0);
        }
        if (*metrics_cmd) {
            return cmd_metrics(events_path, window_capacity, lenient, out_path);
        }
        if (*shuffle_cmd) {
            return cmd_shuffle_demo(list_path, partition_length, seed, out_path);
        }
        if (*state_cmd) {
            if (show_cmd->parsed()) return cmd_state_show(state_dir, user_id);
            if (reset_cmd->parsed()) return cmd_state_reset(state_dir, user_id);
        }
    } catch (const IoError& error) {
        std::cerr << "io error: " << error.what() << "\n";
        return 2;
    } catch (const ValidationError& error) {
        std::cerr << "error: " << error.what() << "\n";
        return 1;
    } catch (const std::exception& error) {
        std::cerr << "error: " << error.what() << "\n";
        return 1;
    }
    return 0;
}
