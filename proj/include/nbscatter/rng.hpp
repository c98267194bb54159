#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace nbs {

// Counter-based generator: draw k of stream (seed, task) is mix(key, k), so
// results do not depend on thread scheduling or on how many draws other tasks made.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t task) : key_(mix(mix(seed) ^ (task * 0xd1b54a32d192ed03ULL + 1))) {}

    std::uint64_t next_u64() { return mix(key_ + 0x9e3779b97f4a7c15ULL * ++counter_); }

    // Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Box-Muller; spelled out so every platform produces the same stream.
    double normal() {
        const double u1 = 1.0 - uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2 * std::numbers::pi * u2);
    }

    std::uint64_t counter() const { return counter_; }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace nbs
