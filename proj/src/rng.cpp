#include "freshrank/rng.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace freshrank {

std::size_t Rng::uniform_below(std::size_t n) {
    if (n <= 1) return 0;
    const std::uint64_t range = static_cast<std::uint64_t>(n);
    // 2^64 mod range; reject draws from the final partial bucket.
    const std::uint64_t overhang =
        (std::numeric_limits<std::uint64_t>::max() % range + 1) % range;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - overhang;
    std::uint64_t draw;
    do {
        draw = next_u64();
    } while (overhang != 0 && draw > limit);
    return static_cast<std::size_t>(draw % range);
}

double Rng::gaussian(double mean, double stddev) {
    if (spare_) {
        double z = *spare_;
        spare_.reset();
        return mean + stddev * z;
    }
    // u1 in (0, 1] keeps the log finite.
    const double u1 =
        (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = uniform01();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    return mean + stddev * radius * std::cos(angle);
}

double Rng::exponential(double mean) {
    if (mean <= 0.0) return 0.0;
    const double u =
        (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    return -mean * std::log(u);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b,
                          std::uint64_t c) {
    auto mix = [](std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    };
    std::uint64_t state = mix(base);
    state = mix(state ^ mix(a + 0x100000001b3ULL));
    state = mix(state ^ mix(b + 0x14650fb0739d0383ULL));
    state = mix(state ^ mix(c + 0x2545f4914f6cdd1dULL));
    return state;
}

}  // namespace freshrank
