#include "freshrank/shuffler.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <utility>

namespace freshrank {

void validate(const ShuffleConfig& config) {
    if (config.partition_length < 1) throw ConfigError("partition_length must be >= 1");
}

namespace {

const std::string& brand_of(const BrandMap& brands, const ProductId& id) {
    auto it = brands.find(id);
    if (it == brands.end()) throw UnknownProduct(id);
    return it->second;
}

}  // namespace

std::vector<std::vector<ProductId>> partition(const std::vector<ProductId>& items, int p) {
    if (p < 1) throw InvalidArgument("partition length must be >= 1, got " + std::to_string(p));
    std::vector<std::vector<ProductId>> blocks;
    const std::size_t step = static_cast<std::size_t>(p);
    for (std::size_t start = 0; start < items.size(); start += step) {
        const std::size_t stop = std::min(items.size(), start + step);
        blocks.emplace_back(items.begin() + start, items.begin() + stop);
    }
    return blocks;
}

std::vector<ProductId> arrange_no_adjacent_brands(const std::vector<ProductId>& block,
                                                  const BrandMap& brands) {
    // Per-brand queues, products ascending by id; brands iterate ascending.
    std::map<std::string, std::vector<ProductId>> queues;
    for (const ProductId& id : block) queues[brand_of(brands, id)].push_back(id);
    for (auto& [brand, ids] : queues) std::sort(ids.begin(), ids.end());

    std::vector<ProductId> arranged;
    arranged.reserve(block.size());
    std::string prev_brand;

    for (std::size_t step = 0; step < block.size(); ++step) {
        // Highest remaining count wins; ties by ascending brand. The brand
        // just placed is skipped unless it is the only one left.
        const std::string* pick = nullptr;
        std::size_t pick_count = 0;
        for (const auto& [brand, ids] : queues) {
            if (ids.empty()) continue;
            if (!arranged.empty() && brand == prev_brand) continue;
            if (ids.size() > pick_count) {
                pick = &brand;
                pick_count = ids.size();
            }
        }
        if (pick == nullptr) pick = &prev_brand;  // forced adjacency

        auto& ids = queues[*pick];
        arranged.push_back(ids.front());
        ids.erase(ids.begin());
        prev_brand = *pick;
    }
    return arranged;
}

int count_brand_adjacencies(const std::vector<ProductId>& items, const BrandMap& brands) {
    int adjacencies = 0;
    for (std::size_t i = 0; i + 1 < items.size(); ++i) {
        if (brand_of(brands, items[i]) == brand_of(brands, items[i + 1])) ++adjacencies;
    }
    return adjacencies;
}

std::vector<std::vector<ProductId>> cross_partition_brand_swap(
    std::vector<std::vector<ProductId>> blocks, const BrandMap& brands, Rng& rng) {
    struct Slot {
        std::size_t block;
        std::size_t pos;
    };

    for (std::size_t i = 0; i < blocks.size(); ++i) {
        // Brand multisets are swap-invariant, so this snapshot stays valid.
        std::map<std::string, std::size_t> first_of_brand;
        for (std::size_t pos = blocks[i].size(); pos-- > 0;) {
            first_of_brand[brand_of(brands, blocks[i][pos])] = pos;
        }

        for (const auto& [brand, local_pos] : first_of_brand) {
            // Counterparts come from partitions not yet visited; a pair of
            // partitions interacting twice for one brand would undo itself.
            std::vector<Slot> counterparts;
            for (std::size_t j = i + 1; j < blocks.size(); ++j) {
                for (std::size_t pos = 0; pos < blocks[j].size(); ++pos) {
                    if (brand_of(brands, blocks[j][pos]) == brand) {
                        counterparts.push_back(Slot{j, pos});
                    }
                }
            }
            if (counterparts.empty()) continue;

            const int before_here = count_brand_adjacencies(blocks[i], brands);
            const std::size_t start = rng.uniform_below(counterparts.size());
            for (std::size_t attempt = 0; attempt < counterparts.size(); ++attempt) {
                const Slot slot = counterparts[(start + attempt) % counterparts.size()];
                const int before_there = count_brand_adjacencies(blocks[slot.block], brands);
                std::swap(blocks[i][local_pos], blocks[slot.block][slot.pos]);
                const bool worse =
                    count_brand_adjacencies(blocks[i], brands) > before_here ||
                    count_brand_adjacencies(blocks[slot.block], brands) > before_there;
                if (!worse) break;
                std::swap(blocks[i][local_pos], blocks[slot.block][slot.pos]);  // undo, retry
            }
        }
    }
    return blocks;
}

RecommendationList shuffle(const RecommendationList& rec_list, const ShuffleConfig& config,
                           const BrandMap& brands) {
    validate(config);
    if (rec_list.items.size() != rec_list.scores.size()) {
        throw LengthMismatch(rec_list.items.size(), rec_list.scores.size());
    }
    if (rec_list.items.size() <= 1) return rec_list;

    std::unordered_map<ProductId, double> score_of;
    score_of.reserve(rec_list.items.size());
    for (std::size_t i = 0; i < rec_list.items.size(); ++i) {
        score_of.emplace(rec_list.items[i], rec_list.scores[i]);
    }

    auto blocks = partition(rec_list.items, config.partition_length);
    for (auto& block : blocks) block = arrange_no_adjacent_brands(block, brands);

    Rng rng(config.rng_seed);
    blocks = cross_partition_brand_swap(std::move(blocks), brands, rng);

    RecommendationList shuffled;
    shuffled.truncated = rec_list.truncated;
    shuffled.items.reserve(rec_list.items.size());
    shuffled.scores.reserve(rec_list.items.size());
    for (const auto& block : blocks) {
        for (const ProductId& id : block) {
            shuffled.items.push_back(id);
            shuffled.scores.push_back(score_of.at(id));
        }
    }
    return shuffled;
}

namespace {

std::uint64_t factorial(std::uint64_t n) {
    if (n > 20) {
        throw InvalidArgument("factorial of " + std::to_string(n) +
                              " overflows 64 bits (max n is 20)");
    }
    std::uint64_t result = 1;
    for (std::uint64_t k = 2; k <= n; ++k) result *= k;
    return result;
}

}  // namespace

std::uint64_t shuffle_space_size(std::uint64_t n, std::uint64_t h, ShuffleSpaceMode mode) {
    if (mode == ShuffleSpaceMode::Whole) return factorial(n);
    if (h < 1) throw InvalidArgument("batch size must be >= 1");
    if (n % h != 0) throw IndivisibleBatch(n, h);
    const std::uint64_t blocks_factorial = factorial(n / h);
    if (blocks_factorial > std::numeric_limits<std::uint64_t>::max() / h) {
        throw InvalidArgument("batched combination count overflows 64 bits");
    }
    return blocks_factorial * h;
}

}  // namespace freshrank
