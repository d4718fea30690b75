#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "freshrank/errors.hpp"

namespace freshrank {

using ProductId = std::string;
using UserId = std::string;
using Timestamp = std::int64_t;  // epoch seconds

constexpr Timestamp kNeverSet = -1;  // weight still at baseline, compares as age 0
constexpr double kBaselineWeight = 1.0;
constexpr std::int64_t kSecondsPerDay = 86400;

struct Product {
    ProductId product_id;
    std::string brand;
    std::map<std::string, std::string> attributes;  // simulator relevance hints only

    friend bool operator==(const Product&, const Product&) = default;
};

// Ordered product collection with an id -> position index.
class Inventory {
public:
    Inventory() = default;

    const std::vector<Product>& products() const { return products_; }
    std::size_t size() const { return products_.size(); }
    const Product& at(std::size_t pos) const { return products_.at(pos); }

    std::optional<std::size_t> find(const ProductId& id) const {
        auto it = index_.find(id);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    // Throws UnknownProduct.
    std::size_t position_of(const ProductId& id) const;

    bool contains(const ProductId& id) const { return index_.count(id) != 0; }

    friend Inventory build_inventory(std::vector<Product> products);

private:
    std::vector<Product> products_;
    std::unordered_map<ProductId, std::size_t> index_;
};

// Validates uniqueness and non-empty brands; preserves input order.
Inventory build_inventory(std::vector<Product> products);

// product_id -> brand lookup used by the shuffler.
std::unordered_map<ProductId, std::string> brand_map(const Inventory& inventory);

enum class ScoreKind { Relevance, NegativeWeights, Final };

const char* to_string(ScoreKind kind);

// One real number per inventory position.
struct ScoreVector {
    std::vector<double> values;
    ScoreKind kind = ScoreKind::Relevance;

    std::size_t size() const { return values.size(); }
    double operator[](std::size_t i) const { return values[i]; }

    friend bool operator==(const ScoreVector&, const ScoreVector&) = default;
};

ScoreVector make_scores(std::vector<double> values, ScoreKind kind);

enum class EventKind { Served, Viewed, Clicked, AddedToPriorityList, Purchased, Dwell };

const char* to_string(EventKind kind);
std::optional<EventKind> event_kind_from_string(const std::string& name);

// One instrumented interaction.
struct EventRecord {
    UserId user_id;
    std::optional<ProductId> product_id;  // absent only for list-level Served markers
    EventKind event_kind = EventKind::Served;
    std::optional<double> dwell_seconds;  // present exactly when event_kind == Dwell
    Timestamp timestamp = 0;

    friend bool operator==(const EventRecord&, const EventRecord&) = default;
};

// Throws ValidationError when the dwell/product-id presence rules are broken.
void validate_event(const EventRecord& event);

// Bounded queue of served product-id sets, most recent last.
struct RecWindow {
    std::deque<std::set<ProductId>> served_sets;
    int capacity = 1;

    // Realized history: the union of every retained set.
    std::set<ProductId> union_all() const;

    friend bool operator==(const RecWindow&, const RecWindow&) = default;
};

// Appends a served set, evicting the oldest entries beyond capacity.
RecWindow push_window(RecWindow window, std::set<ProductId> served);

// Ordered output of one serve call; scores parallel items.
struct RecommendationList {
    std::vector<ProductId> items;
    std::vector<double> scores;
    bool truncated = false;  // fewer candidates than requested

    std::size_t size() const { return items.size(); }
    std::set<ProductId> as_set() const { return {items.begin(), items.end()}; }

    friend bool operator==(const RecommendationList&, const RecommendationList&) = default;
};

// Per-user mutable state threaded through the feedback engine.
struct UserSessionState {
    UserId user_id;
    ScoreVector negative_weights;            // kind == NegativeWeights
    std::vector<Timestamp> weight_set_at;    // kNeverSet while at baseline
    std::vector<std::int64_t> suppression_count;
    std::int64_t serve_count = 0;
    RecWindow window;
    std::set<ProductId> prioritized;

    friend bool operator==(const UserSessionState&, const UserSessionState&) = default;
};

// Fresh state: weights at baseline, empty window of the given capacity.
UserSessionState new_user_state(UserId user_id, const Inventory& inventory, int window_capacity);

}  // namespace freshrank
