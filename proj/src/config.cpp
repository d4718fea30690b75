#include "freshrank/config.hpp"

#include "freshrank/json_io.hpp"

namespace freshrank {

using nlohmann::json;

namespace {

template <typename T>
void read_field(const json& object, const char* key, T& out) {
    if (!object.contains(key)) return;
    try {
        out = object.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(std::string("field '") + key + "' has the wrong type");
    }
}

PenaltyConfig penalty_from_json(const json& object) {
    PenaltyConfig config;
    read_field(object, "dwell_coefficient", config.dwell_coefficient);
    read_field(object, "require_click_without_add", config.require_click_without_add);
    validate(config);
    return config;
}

DecayPolicy decay_from_json(const json& object) {
    DecayPolicy policy;
    std::string variant = to_string(policy.variant);
    read_field(object, "variant", variant);
    const auto parsed = decay_variant_from_string(variant);
    if (!parsed) throw ConfigError("unknown decay variant '" + variant + "'");
    policy.variant = *parsed;
    read_field(object, "parameter", policy.parameter);
    validate(policy);
    return policy;
}

ShuffleConfig shuffle_from_json(const json& object) {
    ShuffleConfig config;
    read_field(object, "partition_length", config.partition_length);
    read_field(object, "rng_seed", config.rng_seed);
    validate(config);
    return config;
}

MetricConfig metric_from_json(const json& object) {
    MetricConfig config;
    read_field(object, "window_capacity", config.window_capacity);
    read_field(object, "freshness_threshold", config.freshness_threshold);
    read_field(object, "max_decay_count", config.max_decay_count);
    validate(config);
    return config;
}

ExperimentConfig experiment_from_json(const json& object) {
    ExperimentConfig config;
    std::string variant = to_string(config.variant);
    read_field(object, "variant", variant);
    const auto parsed = variant_from_string(variant);
    if (!parsed) throw ConfigError("unknown experiment variant '" + variant + "'");
    config.variant = *parsed;
    read_field(object, "sessions", config.sessions);
    read_field(object, "users", config.users);
    read_field(object, "rng_seed", config.rng_seed);
    read_field(object, "noise_sd", config.noise_sd);
    read_field(object, "patience", config.patience);
    read_field(object, "add_threshold", config.add_threshold);
    read_field(object, "view_position_bias", config.view_position_bias);
    read_field(object, "session_gap_seconds", config.session_gap_seconds);
    read_field(object, "start_timestamp", config.start_timestamp);
    read_field(object, "inventory_size", config.inventory_size);
    read_field(object, "brand_count", config.brand_count);
    return config;
}

}  // namespace

AppConfig config_from_json(const json& object) {
    if (!object.is_object()) throw ConfigError("config root must be a JSON object");

    AppConfig config;
    read_field(object, "t", config.engine.t);
    read_field(object, "exclude_prioritized", config.engine.exclude_prioritized);
    if (object.contains("PenaltyConfig")) {
        config.engine.penalty = penalty_from_json(object.at("PenaltyConfig"));
    }
    if (object.contains("DecayPolicy")) {
        config.engine.decay = decay_from_json(object.at("DecayPolicy"));
    }
    if (object.contains("ShuffleConfig")) {
        config.shuffle = shuffle_from_json(object.at("ShuffleConfig"));
    }
    if (object.contains("MetricConfig")) {
        config.metric = metric_from_json(object.at("MetricConfig"));
    }
    if (object.contains("ExperimentConfig")) {
        config.experiment = experiment_from_json(object.at("ExperimentConfig"));
    }
    if (object.contains("inventory")) {
        config.inventory_products = products_from_json(object.at("inventory"));
    }
    validate(config.engine);

    // The experiment carries complete copies of the per-module configs.
    config.experiment.engine = config.engine;
    config.experiment.metric = config.metric;
    config.experiment.shuffle = config.shuffle;
    validate(config.experiment);
    return config;
}

AppConfig load_config(const std::filesystem::path& path) {
    json object = json::parse(read_text_file(path), nullptr, false);
    if (object.is_discarded()) throw ConfigError("config file is malformed JSON");
    return config_from_json(object);
}

std::vector<Product> products_from_json(const json& array) {
    if (!array.is_array()) throw ConfigError("product list must be a JSON array");
    std::vector<Product> products;
    products.reserve(array.size());
    for (const json& entry : array) {
        if (!entry.is_object() || !entry.contains("id") || !entry.contains("brand")) {
            throw ConfigError("each product needs an 'id' and a 'brand'");
        }
        Product product;
        try {
            product.product_id = entry.at("id").get<std::string>();
            product.brand = entry.at("brand").get<std::string>();
            if (entry.contains("attributes")) {
                product.attributes =
                    entry.at("attributes").get<std::map<std::string, std::string>>();
            }
        } catch (const json::exception&) {
            throw ConfigError("product fields have the wrong type");
        }
        products.push_back(std::move(product));
    }
    return products;
}

Inventory inventory_from_config(const AppConfig& config) {
    if (!config.inventory_products.empty()) return build_inventory(config.inventory_products);
    return make_synthetic_inventory(config.experiment.inventory_size,
                                    config.experiment.brand_count);
}

json config_to_json(const AppConfig& config) {
    json object;
    object["t"] = config.engine.t;
    object["exclude_prioritized"] = config.engine.exclude_prioritized;
    object["PenaltyConfig"] = {
        {"dwell_coefficient", config.engine.penalty.dwell_coefficient},
        {"require_click_without_add", config.engine.penalty.require_click_without_add},
    };
    object["DecayPolicy"] = {
        {"variant", to_string(config.engine.decay.variant)},
        {"parameter", config.engine.decay.parameter},
    };
    object["ShuffleConfig"] = {
        {"partition_length", config.shuffle.partition_length},
        {"rng_seed", config.shuffle.rng_seed},
    };
    object["MetricConfig"] = {
        {"window_capacity", config.metric.window_capacity},
        {"freshness_threshold", config.metric.freshness_threshold},
        {"max_decay_count", config.metric.max_decay_count},
    };
    object["ExperimentConfig"] = {
        {"variant", to_string(config.experiment.variant)},
        {"sessions", config.experiment.sessions},
        {"users", config.experiment.users},
        {"rng_seed", config.experiment.rng_seed},
        {"noise_sd", config.experiment.noise_sd},
        {"patience", config.experiment.patience},
        {"add_threshold", config.experiment.add_threshold},
        {"view_position_bias", config.experiment.view_position_bias},
        {"session_gap_seconds", config.experiment.session_gap_seconds},
        {"start_timestamp", config.experiment.start_timestamp},
        {"inventory_size", config.experiment.inventory_size},
        {"brand_count", config.experiment.brand_count},
    };
    if (!config.inventory_products.empty()) {
        json inventory = json::array();
        for (const Product& product : config.inventory_products) {
            json entry;
            entry["id"] = product.product_id;
            entry["brand"] = product.brand;
            if (!product.attributes.empty()) entry["attributes"] = product.attributes;
            inventory.push_back(entry);
        }
        object["inventory"] = inventory;
    }
    return object;
}

}  // namespace freshrank
