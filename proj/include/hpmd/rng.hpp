#pragma once

#include <cstdint>

namespace hpmd {

/// SplitMix64 finaliser.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Counter-based stream: the state is a pure function of (seed, k, s, a, i), so
/// draws never depend on scheduling or thread count.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t k, std::uint64_t s, std::uint64_t a, std::uint64_t i)
        : state_(mix64(mix64(mix64(mix64(mix64(seed) ^ k) ^ s) ^ a) ^ i)) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

private:
    std::uint64_t state_;
};

}  // namespace hpmd
