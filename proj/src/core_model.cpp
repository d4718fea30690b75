#include "freshrank/core_model.hpp"

#include <cmath>
#include <utility>

namespace freshrank {

std::size_t Inventory::position_of(const ProductId& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw UnknownProduct(id);
    return it->second;
}

Inventory build_inventory(std::vector<Product> products) {
    if (products.empty()) throw EmptyInventory();
    Inventory inventory;
    inventory.index_.reserve(products.size());
    for (std::size_t pos = 0; pos < products.size(); ++pos) {
        const Product& product = products[pos];
        if (product.brand.empty()) {
            throw ValidationError("product '" + product.product_id + "' has an empty brand");
        }
        auto [it, inserted] = inventory.index_.emplace(product.product_id, pos);
        if (!inserted) throw DuplicateProductId(product.product_id);
    }
    inventory.products_ = std::move(products);
    return inventory;
}

std::unordered_map<ProductId, std::string> brand_map(const Inventory& inventory) {
    std::unordered_map<ProductId, std::string> brands;
    brands.reserve(inventory.size());
    for (const Product& product : inventory.products()) {
        brands.emplace(product.product_id, product.brand);
    }
    return brands;
}

const char* to_string(ScoreKind kind) {
    switch (kind) {
        case ScoreKind::Relevance: return "relevance";
        case ScoreKind::NegativeWeights: return "negative_weights";
        case ScoreKind::Final: return "final";
    }
    return "?";
}

ScoreVector make_scores(std::vector<double> values, ScoreKind kind) {
    for (double v : values) {
        if (!std::isfinite(v)) throw ValidationError("score values must be finite");
        if (kind == ScoreKind::NegativeWeights && v < 0.0) {
            throw ValidationError("negative-weight values must be >= 0");
        }
    }
    return ScoreVector{std::move(values), kind};
}

const char* to_string(EventKind kind) {
    switch (kind) {
        case EventKind::Served: return "served";
        case EventKind::Viewed: return "viewed";
        case EventKind::Clicked: return "clicked";
        case EventKind::AddedToPriorityList: return "added_to_priority_list";
        case EventKind::Purchased: return "purchased";
        case EventKind::Dwell: return "dwell";
    }
    return "?";
}

std::optional<EventKind> event_kind_from_string(const std::string& name) {
    if (name == "served") return EventKind::Served;
    if (name == "viewed") return EventKind::Viewed;
    if (name == "clicked") return EventKind::Clicked;
    if (name == "added_to_priority_list") return EventKind::AddedToPriorityList;
    if (name == "purchased") return EventKind::Purchased;
    if (name == "dwell") return EventKind::Dwell;
    return std::nullopt;
}

void validate_event(const EventRecord& event) {
    const bool is_dwell = event.event_kind == EventKind::Dwell;
    if (is_dwell != event.dwell_seconds.has_value()) {
        throw ValidationError(is_dwell ? "dwell event is missing dwell_seconds"
                                       : "dwell_seconds present on a non-dwell event");
    }
    if (event.dwell_seconds) {
        if (!std::isfinite(*event.dwell_seconds) || *event.dwell_seconds < 0.0) {
            throw ValidationError("dwell_seconds must be finite and >= 0");
        }
    }
    if (event.event_kind != EventKind::Served && !event.product_id) {
        throw ValidationError(std::string("event kind '") + to_string(event.event_kind) +
                              "' requires a product_id");
    }
}

std::set<ProductId> RecWindow::union_all() const {
    std::set<ProductId> all;
    for (const auto& served : served_sets) all.insert(served.begin(), served.end());
    return all;
}

RecWindow push_window(RecWindow window, std::set<ProductId> served) {
    window.served_sets.push_back(std::move(served));
    while (static_cast<int>(window.served_sets.size()) > window.capacity) {
        window.served_sets.pop_front();
    }
    return window;
}

UserSessionState new_user_state(UserId user_id, const Inventory& inventory, int window_capacity) {
    if (window_capacity < 1) throw InvalidWindowCapacity(window_capacity);
    UserSessionState state;
    state.user_id = std::move(user_id);
    state.negative_weights =
        ScoreVector{std::vector<double>(inventory.size(), kBaselineWeight),
                    ScoreKind::NegativeWeights};
    state.weight_set_at.assign(inventory.size(), kNeverSet);
    state.suppression_count.assign(inventory.size(), 0);
    state.serve_count = 0;
    state.window.capacity = window_capacity;
    return state;
}

}  // namespace freshrank
