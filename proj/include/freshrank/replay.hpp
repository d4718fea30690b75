#pragma once

#include <filesystem>
#include <map>
#include <vector>

#include "freshrank/config.hpp"
#include "freshrank/core_model.hpp"
#include "freshrank/freshness_metric.hpp"
#include "freshrank/json_io.hpp"

namespace freshrank {

struct IngestResult {
    std::vector<EventRecord> events;
    std::size_t skipped = 0;  // malformed lines dropped in lenient mode
};

// Line-delimited JSON event log. Strict mode throws ParseError with the line
// number; lenient mode skips bad lines and counts them.
IngestResult ingest_events(const std::filesystem::path& path, ParseMode mode);

using StateMap = std::map<UserId, UserSessionState>;

struct ReplayResult {
    std::vector<MetricReportRecord> records;  // one per replayed serve call
};

// Replays a recorded log against per-user states: each contiguous run of
// Served events opens a serve cycle, the events that follow it form that
// cycle's interaction batch (dwell penalties, priority-list adds, decay).
// Events must be sorted by timestamp or OutOfOrderEvents is thrown.
ReplayResult replay(const std::vector<EventRecord>& events, StateMap& states,
                    const Inventory& inventory, const AppConfig& config);

// States for every user present in a directory of snapshots.
StateMap load_states(const std::filesystem::path& state_dir);
void save_states(const std::filesystem::path& state_dir, const StateMap& states);

}  // namespace freshrank
