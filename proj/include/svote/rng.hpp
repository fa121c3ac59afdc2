#pragma once

#include <cstdint>
#include <initializer_list>

#include "svote/normal.hpp"

namespace svote {

// 64-bit avalanche finalizer (SplitMix64).
constexpr std::uint64_t mix64(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
}

inline constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ULL;

// Key for an independent substream, derived from a master seed and a path of
// ids (domain tag, item index, draw index, ...). Pure function of its inputs,
// so any worker can rebuild any stream.
constexpr std::uint64_t substream(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
    std::uint64_t k = mix64(seed ^ 0x6a09e667f3bcc908ULL);
    for (const std::uint64_t c : path) k = mix64((k + kGoldenGamma) ^ mix64(c + kGoldenGamma));
    return k;
}

// Stream domain tags; keep values stable, they are part of the output contract.
namespace stream {
inline constexpr std::uint64_t kElectorate = 1;
inline constexpr std::uint64_t kPerceptionNoise = 2;
inline constexpr std::uint64_t kSynthSelf = 3;
inline constexpr std::uint64_t kSynthPerceived = 4;
inline constexpr std::uint64_t kSynthVote = 5;
inline constexpr std::uint64_t kSimPerceived = 6;
inline constexpr std::uint64_t kSimVote = 7;
}  // namespace stream

// Counter-based generator: output i is a pure function of (key, i).
class CounterRng {
public:
    explicit constexpr CounterRng(std::uint64_t key) : key_(key) {}

    constexpr std::uint64_t next_u64() {
        ++count_;
        return mix64(key_ + count_ * kGoldenGamma);
    }

    // Uniform on the open interval (0, 1).
    double next_uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    double next_normal() { return std_normal_quantile(next_uniform()); }

private:
    std::uint64_t key_;
    std::uint64_t count_ = 0;
};

}  // namespace svote
