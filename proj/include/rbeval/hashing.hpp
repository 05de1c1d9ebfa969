#pragma once

#include <cstdint>
#include <string_view>

namespace rbeval {

// SplitMix64 finalizer. Counter-based draws are built by folding identity
// components into a 64-bit state, so results do not depend on generation order.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// One uniform variate per (seed, key components...). Mixing is associative
// enough for our purposes: each mix() permutes the full 64-bit state.
class StreamKey {
public:
    explicit StreamKey(std::uint64_t seed) : state_(splitmix64(seed ^ 0x517cc1b727220a95ULL)) {}

    StreamKey& mix(std::uint64_t v) {
        state_ = splitmix64(state_ ^ v);
        return *this;
    }

    StreamKey& mix(std::string_view s) {
        std::uint64_t acc = 0xcbf29ce484222325ULL;  // FNV-1a
        for (unsigned char c : s) {
            acc ^= c;
            acc *= 0x100000001b3ULL;
        }
        return mix(acc);
    }

    std::uint64_t value() const { return state_; }

    // [0, 1) with 53 random mantissa bits.
    double uniform01() const { return static_cast<double>(state_ >> 11) * 0x1.0p-53; }

private:
    std::uint64_t state_;
};

}  // namespace rbeval
