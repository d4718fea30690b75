#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "freshrank/core_model.hpp"
#include "freshrank/freshness_metric.hpp"

namespace freshrank {

enum class ParseMode { Strict, Lenient };

// --- Event log lines -------------------------------------------------------
// One flat JSON object per line: {user_id, product_id?, event_kind,
// dwell_seconds?, timestamp}. Strict mode rejects unknown fields.

nlohmann::json event_to_json(const EventRecord& event);
EventRecord event_from_json(const nlohmann::json& object, ParseMode mode,
                            std::size_t line_no = 0);

std::string serialize_event_line(const EventRecord& event);
EventRecord parse_event_line(const std::string& line, ParseMode mode, std::size_t line_no = 0);

// --- State snapshots (version "v1") ----------------------------------------

nlohmann::json state_to_json(const UserSessionState& state);
UserSessionState state_from_json(const nlohmann::json& object);

std::string serialize_state(const UserSessionState& state);
UserSessionState deserialize_state(const std::string& text);

// --- Metric report records --------------------------------------------------

nlohmann::json metric_record_to_json(const MetricReportRecord& record);
MetricReportRecord metric_record_from_json(const nlohmann::json& object);

// --- Files ------------------------------------------------------------------

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& content);

// Snapshot file name for a user id (unsafe characters percent-encoded).
std::string state_file_name(const UserId& user_id);

void save_state(const std::filesystem::path& state_dir, const UserSessionState& state);
std::optional<UserSessionState> load_state(const std::filesystem::path& state_dir,
                                           const UserId& user_id);

}  // namespace freshrank
