#pragma once

// Counter-based random streams.
//
// Every stream is keyed by (seed, label) and element i of a stream is the i-th
// output of a SplitMix64 generator started at that key. Elements can therefore
// be produced in any order, by any number of threads, with identical results.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

namespace sfplap::rng {

inline constexpr std::uint64_t golden_gamma = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// FNV-1a over the label, folded through mix64 so nearby labels decorrelate.
constexpr std::uint64_t label_hash(std::string_view label) noexcept {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (char c : label) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001B3ULL;
    }
    return mix64(h);
}

/// Seed of replica r derived from a base seed. The mixing constant below is
/// part of the output format: changing it changes every replica seed.
inline constexpr std::uint64_t replica_seed_offset = 0xD1B54A32D192ED03ULL;

constexpr std::uint64_t replica_seed(std::uint64_t base_seed, std::uint64_t replica) noexcept {
    return base_seed ^ mix64(replica_seed_offset + replica * golden_gamma);
}

/// Map 64 random bits to the open interval (0, 1).
constexpr double to_unit_open(std::uint64_t bits) noexcept {
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

class Stream {
public:
    constexpr Stream(std::uint64_t seed, std::string_view label) noexcept
        : key_(mix64(seed ^ label_hash(label))) {}

    constexpr std::uint64_t bits(std::uint64_t index) const noexcept {
        return mix64(key_ + (index + 1) * golden_gamma);
    }

    /// Uniform on (0, 1).
    constexpr double uniform(std::uint64_t index) const noexcept { return to_unit_open(bits(index)); }

    /// Standard normal via Box-Muller on uniforms 2i and 2i+1 (cosine branch only).
    double gaussian(std::uint64_t index) const noexcept {
        const double u1 = uniform(2 * index);
        const double u2 = uniform(2 * index + 1);
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    std::uint64_t key_;
};

/// Sequential cursor over a Stream, for callers that just want "the next draw".
class Cursor {
public:
    constexpr Cursor(std::uint64_t seed, std::string_view label) noexcept : stream_(seed, label) {}

    double uniform() noexcept { return stream_.uniform(next_++); }
    double gaussian() noexcept {
        const double u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }
    std::uint64_t bits() noexcept { return stream_.bits(next_++); }

private:
    Stream stream_;
    std::uint64_t next_ = 0;
};

}  // namespace sfplap::rng
