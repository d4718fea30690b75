#include "freshrank/json_io.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace freshrank {

using nlohmann::json;

namespace {

[[noreturn]] void parse_fail(std::size_t line_no, const std::string& detail) {
    throw ParseError(line_no, detail);
}

}  // namespace

json event_to_json(const EventRecord& event) {
    json object;
    object["user_id"] = event.user_id;
    if (event.product_id) object["product_id"] = *event.product_id;
    object["event_kind"] = to_string(event.event_kind);
    if (event.dwell_seconds) object["dwell_seconds"] = *event.dwell_seconds;
    object["timestamp"] = event.timestamp;
    return object;
}

EventRecord event_from_json(const json& object, ParseMode mode, std::size_t line_no) {
    if (!object.is_object()) parse_fail(line_no, "event line is not a JSON object");

    static const std::set<std::string> known_fields = {
        "user_id", "product_id", "event_kind", "dwell_seconds", "timestamp"};
    if (mode == ParseMode::Strict) {
        for (const auto& [key, value] : object.items()) {
            if (known_fields.count(key) == 0) parse_fail(line_no, "unknown field '" + key + "'");
        }
    }

    EventRecord event;
    if (!object.contains("user_id") || !object["user_id"].is_string()) {
        parse_fail(line_no, "missing or non-string user_id");
    }
    event.user_id = object["user_id"].get<std::string>();

    if (object.contains("product_id")) {
        if (!object["product_id"].is_string()) parse_fail(line_no, "non-string product_id");
        event.product_id = object["product_id"].get<std::string>();
    }

    if (!object.contains("event_kind") || !object["event_kind"].is_string()) {
        parse_fail(line_no, "missing or non-string event_kind");
    }
    const auto kind = event_kind_from_string(object["event_kind"].get<std::string>());
    if (!kind) {
        parse_fail(line_no,
                   "unknown event_kind '" + object["event_kind"].get<std::string>() + "'");
    }
    event.event_kind = *kind;

    if (object.contains("dwell_seconds")) {
        if (!object["dwell_seconds"].is_number()) parse_fail(line_no, "non-numeric dwell_seconds");
        event.dwell_seconds = object["dwell_seconds"].get<double>();
    }

    if (!object.contains("timestamp") || !object["timestamp"].is_number_integer()) {
        parse_fail(line_no, "missing or non-integer timestamp");
    }
    event.timestamp = object["timestamp"].get<Timestamp>();

    try {
        validate_event(event);
    } catch (const ValidationError& error) {
        parse_fail(line_no, error.what());
    }
    return event;
}

std::string serialize_event_line(const EventRecord& event) {
    return event_to_json(event).dump();
}

EventRecord parse_event_line(const std::string& line, ParseMode mode, std::size_t line_no) {
    json object = json::parse(line, nullptr, false);
    if (object.is_discarded()) parse_fail(line_no, "malformed JSON");
    return event_from_json(object, mode, line_no);
}

json state_to_json(const UserSessionState& state) {
    json object;
    object["version"] = "v1";
    object["user_id"] = state.user_id;
    object["negative_weights"] = state.negative_weights.values;
    object["weight_set_at"] = state.weight_set_at;
    object["suppression_count"] = state.suppression_count;
    object["serve_count"] = state.serve_count;
    json window;
    window["capacity"] = state.window.capacity;
    json sets = json::array();
    for (const auto& served : state.window.served_sets) {
        sets.push_back(std::vector<ProductId>(served.begin(), served.end()));
    }
    window["served_sets"] = sets;
    object["window"] = window;
    object["prioritized"] = std::vector<ProductId>(state.prioritized.begin(),
                                                   state.prioritized.end());
    return object;
}

UserSessionState state_from_json(const json& object) {
    if (!object.is_object()) throw ValidationError("state snapshot is not a JSON object");
    if (!object.contains("version") || object["version"] != "v1") {
        throw ValidationError("unsupported state snapshot version");
    }
    UserSessionState state;
    try {
        state.user_id = object.at("user_id").get<std::string>();
        state.negative_weights.kind = ScoreKind::NegativeWeights;
        state.negative_weights.values = object.at("negative_weights").get<std::vector<double>>();
        state.weight_set_at = object.at("weight_set_at").get<std::vector<Timestamp>>();
        state.suppression_count =
            object.at("suppression_count").get<std::vector<std::int64_t>>();
        state.serve_count = object.at("serve_count").get<std::int64_t>();
        const json& window = object.at("window");
        state.window.capacity = window.at("capacity").get<int>();
        for (const json& entry : window.at("served_sets")) {
            auto ids = entry.get<std::vector<ProductId>>();
            state.window.served_sets.emplace_back(ids.begin(), ids.end());
        }
        auto prioritized = object.at("prioritized").get<std::vector<ProductId>>();
        state.prioritized.insert(prioritized.begin(), prioritized.end());
    } catch (const json::exception& error) {
        throw ValidationError(std::string("bad state snapshot: ") + error.what());
    }
    const std::size_t n = state.negative_weights.size();
    if (state.weight_set_at.size() != n || state.suppression_count.size() != n) {
        throw ValidationError("state snapshot arrays disagree on inventory size");
    }
    for (double w : state.negative_weights.values) {
        if (!std::isfinite(w) || w < 0.0) {
            throw ValidationError("state snapshot has invalid negative weights");
        }
    }
    if (state.window.capacity < 1) throw InvalidWindowCapacity(state.window.capacity);
    return state;
}

std::string serialize_state(const UserSessionState& state) {
    return state_to_json(state).dump(2) + "\n";
}

UserSessionState deserialize_state(const std::string& text) {
    json object = json::parse(text, nullptr, false);
    if (object.is_discarded()) throw ValidationError("state snapshot is malformed JSON");
    return state_from_json(object);
}

json metric_record_to_json(const MetricReportRecord& record) {
    json object;
    object["user_id"] = record.user_id;
    object["call_index"] = record.call_index;
    object["freshness"] = record.freshness;
    object["window_mode"] = record.window_mode;
    object["replacements_made"] = record.replacements_made;
    object["exhausted"] = record.exhausted;
    return object;
}

MetricReportRecord metric_record_from_json(const json& object) {
    MetricReportRecord record;
    try {
        record.user_id = object.at("user_id").get<std::string>();
        record.call_index = object.at("call_index").get<int>();
        record.freshness = object.at("freshness").get<double>();
        record.window_mode = object.at("window_mode").get<std::string>();
        record.replacements_made = object.at("replacements_made").get<int>();
        record.exhausted = object.at("exhausted").get<bool>();
    } catch (const json::exception& error) {
        throw ValidationError(std::string("bad metric record: ") + error.what());
    }
    if (record.window_mode != "alg3_set" && record.window_mode != "sliding_k") {
        throw ValidationError("unknown window_mode '" + record.window_mode + "'");
    }
    return record;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream input(path, std::ios::binary);
    if (!input) throw IoError("cannot open for reading: " + path.string());
    std::ostringstream buffer;
    buffer << input.rdbuf();
    if (input.bad()) throw IoError("read failed: " + path.string());
    return buffer.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
        if (ec) throw IoError("cannot create directory: " + path.parent_path().string());
    }
    std::ofstream output(path, std::ios::binary | std::ios::trunc);
    if (!output) throw IoError("cannot open for writing: " + path.string());
    output << content;
    output.flush();
    if (!output) throw IoError("write failed: " + path.string());
}

std::string state_file_name(const UserId& user_id) {
    std::string name;
    name.reserve(user_id.size() + 8);
    for (unsigned char c : user_id) {
        const bool safe = std::isalnum(c) || c == '-' || c == '_' || c == '.';
        if (safe) {
            name.push_back(static_cast<char>(c));
        } else {
            char buffer[4];
            std::snprintf(buffer, sizeof(buffer), "%%%02X", c);
            name += buffer;
        }
    }
    return name + ".json";
}

void save_state(const std::filesystem::path& state_dir, const UserSessionState& state) {
    write_text_file(state_dir / state_file_name(state.user_id), serialize_state(state));
}

std::optional<UserSessionState> load_state(const std::filesystem::path& state_dir,
                                           const UserId& user_id) {
    const auto path = state_dir / state_file_name(user_id);
    if (!std::filesystem::exists(path)) return std::nullopt;
    return deserialize_state(read_text_file(path));
}

}  // namespace freshrank
