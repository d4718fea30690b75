#include "freshrank/replay.hpp"

#include <algorithm>
#include <fstream>
#include <utility>

#include "freshrank/feedback_engine.hpp"

namespace freshrank {

IngestResult ingest_events(const std::filesystem::path& path, ParseMode mode) {
    std::ifstream input(path);
    if (!input) throw IoError("cannot open event log: " + path.string());

    IngestResult result;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(input, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            result.events.push_back(parse_event_line(line, mode, line_no));
        } catch (const ParseError&) {
            if (mode == ParseMode::Strict) throw;
            ++result.skipped;
        }
    }
    if (input.bad()) throw IoError("read failed: " + path.string());
    return result;
}

namespace {

struct ServeCycle {
    std::set<ProductId> served;
    std::vector<EventRecord> interactions;
    Timestamp last_timestamp = 0;
};

// Splits one user's events into cycles. A leading interaction-only batch
// (events before any Served run) becomes a cycle with an empty served set.
std::vector<ServeCycle> split_cycles(const std::vector<EventRecord>& events) {
    std::vector<ServeCycle> cycles;
    std::size_t i = 0;
    const std::size_t n = events.size();

    if (n > 0 && events[0].event_kind != EventKind::Served) {
        cycles.emplace_back();
    }
    while (i < n) {
        if (events[i].event_kind == EventKind::Served) {
            cycles.emplace_back();
            while (i < n && events[i].event_kind == EventKind::Served) {
                if (events[i].product_id) cycles.back().served.insert(*events[i].product_id);
                cycles.back().last_timestamp = events[i].timestamp;
                ++i;
            }
        } else {
            cycles.back().interactions.push_back(events[i]);
            cycles.back().last_timestamp = events[i].timestamp;
            ++i;
        }
    }
    return cycles;
}

}  // namespace

ReplayResult replay(const std::vector<EventRecord>& events, StateMap& states,
                    const Inventory& inventory, const AppConfig& config) {
    for (std::size_t i = 1; i < events.size(); ++i) {
        if (events[i].timestamp < events[i - 1].timestamp) throw OutOfOrderEvents(i + 1);
    }

    // Group per user, preserving log order and first-appearance user order.
    std::vector<UserId> user_order;
    std::map<UserId, std::vector<EventRecord>> per_user;
    for (const EventRecord& event : events) {
        auto [it, inserted] = per_user.try_emplace(event.user_id);
        if (inserted) user_order.push_back(event.user_id);
        it->second.push_back(event);
    }

    ReplayResult result;
    for (const UserId& user_id : user_order) {
        auto state_it = states.find(user_id);
        UserSessionState state =
            state_it != states.end()
                ? state_it->second
                : new_user_state(user_id, inventory, config.metric.window_capacity);
        if (state.negative_weights.size() != inventory.size()) {
            throw ValidationError("state snapshot for '" + user_id +
                                  "' does not match the inventory size");
        }

        int call_index = 0;
        for (const ServeCycle& cycle : split_cycles(per_user[user_id])) {
            if (!cycle.served.empty()) {
                RecommendationList list;
                list.items.assign(cycle.served.begin(), cycle.served.end());
                list.scores.assign(list.items.size(), 0.0);
                for (const ProductId& id : list.items) {
                    if (!inventory.contains(id)) throw UnknownProduct(id);
                }

                MetricReportRecord record;
                record.user_id = user_id;
                record.call_index = call_index++;
                record.freshness = compute_freshness(list, state.window.union_all());
                record.window_mode = "sliding_k";
                result.records.push_back(record);

                state.window = push_window(std::move(state.window), cycle.served);
                state.serve_count += 1;
            }

            for (const EventRecord& event : cycle.interactions) {
                if (event.event_kind == EventKind::AddedToPriorityList ||
                    event.event_kind == EventKind::Purchased) {
                    if (event.product_id) {
                        if (!inventory.contains(*event.product_id)) {
                            throw UnknownProduct(*event.product_id);
                        }
                        state.prioritized.insert(*event.product_id);
                    }
                }
            }

            const ScoreVector dwell =
                build_dwell_array(cycle.interactions, state, inventory, config.engine.penalty);
            state = apply_penalty(std::move(state), dwell, config.engine.penalty,
                                  cycle.last_timestamp);
            state = apply_decay(std::move(state), config.engine.decay, cycle.last_timestamp);
        }

        states[user_id] = std::move(state);
    }
    return result;
}

StateMap load_states(const std::filesystem::path& state_dir) {
    StateMap states;
    if (!std::filesystem::exists(state_dir)) return states;
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(state_dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".json") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    for (const auto& path : files) {
        UserSessionState state = deserialize_state(read_text_file(path));
        states[state.user_id] = std::move(state);
    }
    return states;
}

void save_states(const std::filesystem::path& state_dir, const StateMap& states) {
    for (const auto& [user_id, state] : states) save_state(state_dir, state);
}

}  // namespace freshrank
