#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "freshrank/feedback_engine.hpp"
#include "freshrank/freshness_metric.hpp"
#include "freshrank/shuffler.hpp"
#include "freshrank/simulator.hpp"

namespace freshrank {

// Parsed config file. Blocks are named exactly after their types; `t` and
// `exclude_prioritized` sit at the top level next to them. An optional
// "inventory" array pins the product list; otherwise a synthetic inventory is
// built from the experiment's inventory_size and brand_count.
struct AppConfig {
    EngineConfig engine;
    MetricConfig metric;
    ShuffleConfig shuffle;
    ExperimentConfig experiment;
    std::vector<Product> inventory_products;  // empty -> synthetic

    friend bool operator==(const AppConfig&, const AppConfig&) = default;
};

AppConfig config_from_json(const nlohmann::json& object);
AppConfig load_config(const std::filesystem::path& path);
nlohmann::json config_to_json(const AppConfig& config);

// Product lists for the config's inventory block and shuffle-demo inputs:
// a JSON array of {"id": ..., "brand": ...} objects.
std::vector<Product> products_from_json(const nlohmann::json& array);
Inventory inventory_from_config(const AppConfig& config);

}  // namespace freshrank
