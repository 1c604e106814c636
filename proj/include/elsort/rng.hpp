#pragma once

#include <cstdint>

namespace elsort {

/// splitmix64 increment; one state step per output.
inline constexpr std::uint64_t kSplitMixGamma = 0x9e3779b97f4a7c15ULL;

/// Fully specified 64-bit generator. Every random choice in elsort goes
/// through this so that files and reports are bit-reproducible across
/// platforms and standard-library versions.
class SplitMix64 {
public:
    explicit constexpr SplitMix64(std::uint64_t seed) : state_(seed) {}

    constexpr std::uint64_t next() {
        state_ += kSplitMixGamma;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform draw in [0, bound), bound >= 1. Rejection sampling keeps the
    /// result exactly uniform.
    constexpr std::uint64_t next_below(std::uint64_t bound) {
        const std::uint64_t threshold = (0 - bound) % bound; // 2^64 mod bound
        for (;;) {
            const std::uint64_t v = next();
            if (v >= threshold) {
                return v % bound;
            }
        }
    }

    /// Uniform double in [0, 1), 53 bits of resolution.
    constexpr double next_unit() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    constexpr std::uint64_t state() const { return state_; }

private:
    std::uint64_t state_;
};

} // namespace elsort
