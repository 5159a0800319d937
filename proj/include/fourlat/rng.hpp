#pragma once

#include <cstdint>

namespace fourlat {

// splitmix64: cheap, deterministic, and safe to derive independent
// per-task streams from (seed, index) without sharing state.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t s = seed ^ (0x9e3779b97f4a7c15ULL * (index + 1));
    return splitmix64(s);
}

// Uniform double in [0, 1).
inline double uniform01(std::uint64_t& state) {
    return static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
}

inline double uniform(std::uint64_t& state, double lo, double hi) {
    return lo + (hi - lo) * uniform01(state);
}

} // namespace fourlat
