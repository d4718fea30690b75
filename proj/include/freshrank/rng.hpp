#pragma once

#include <cstdint>
#include <optional>
#include <random>

namespace freshrank {

// Seeded generator with self-contained sampling routines. The standard
// distributions are implementation-defined, so uniform/gaussian/exponential
// draws are produced here from raw mt19937_64 output; the algorithm id is
// recorded in report headers so replays stay exact.
class Rng {
public:
    static constexpr const char* kAlgorithmId = "mt19937_64+boxmuller/v1";

    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on [0, 1), 53-bit resolution.
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    bool bernoulli(double p) { return uniform01() < p; }

    // Uniform integer in [0, n). n must be >= 1. Rejection-sampled, unbiased.
    std::size_t uniform_below(std::size_t n);

    // Box-Muller with a cached spare.
    double gaussian(double mean, double stddev);

    // Inverse-CDF exponential with the given mean (mean <= 0 yields 0).
    double exponential(double mean);

private:
    std::mt19937_64 engine_;
    std::optional<double> spare_;
};

// Mixes a base seed with up to three stream coordinates (splitmix64 finalizer),
// giving independent per-(user, session, purpose) streams.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0,
                          std::uint64_t c = 0);

}  // namespace freshrank
