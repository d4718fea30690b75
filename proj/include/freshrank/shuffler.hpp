#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "freshrank/core_model.hpp"
#include "freshrank/rng.hpp"

namespace freshrank {

using BrandMap = std::unordered_map<ProductId, std::string>;

struct ShuffleConfig {
    int partition_length = 5;
    std::uint64_t rng_seed = 0;

    friend bool operator==(const ShuffleConfig&, const ShuffleConfig&) = default;
};

void validate(const ShuffleConfig& config);

// Contiguous blocks of length p, last block possibly shorter.
std::vector<std::vector<ProductId>> partition(const std::vector<ProductId>& items, int p);

// Permutes one block so products of the same brand are not adjacent whenever
// that is feasible (max brand multiplicity <= ceil(len/2)); otherwise the
// adjacency count is minimized. Greedy highest-remaining-count placement,
// ties by ascending brand then ascending product id. Deterministic.
std::vector<ProductId> arrange_no_adjacent_brands(const std::vector<ProductId>& block,
                                                  const BrandMap& brands);

// For each block and each brand in it (ascending block index, then ascending
// brand), swaps the first product of that brand with a uniformly random
// same-brand product from the not-yet-visited blocks, when one exists.
// Positions are preserved, so per-block brand sequences never change.
std::vector<std::vector<ProductId>> cross_partition_brand_swap(
    std::vector<std::vector<ProductId>> blocks, const BrandMap& brands, Rng& rng);

// Full pipeline: partition -> arrange -> cross-partition swap -> flatten.
// Output is a permutation of the input; scores travel with their products.
RecommendationList shuffle(const RecommendationList& rec_list, const ShuffleConfig& config,
                           const BrandMap& brands);

// Same-brand adjacent pairs in a sequence.
int count_brand_adjacencies(const std::vector<ProductId>& items, const BrandMap& brands);

enum class ShuffleSpaceMode { Whole, Batched };

// Combination counts for the two shuffling schemes: whole-list gives n!,
// batched gives (n/h)! * h. Throws IndivisibleBatch when h does not divide n.
std::uint64_t shuffle_space_size(std::uint64_t n, std::uint64_t h, ShuffleSpaceMode mode);

}  // namespace freshrank
