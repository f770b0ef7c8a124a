#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace ranslice {

// Subsystem ids used to derive independent random substreams from the
// master seed. Values are part of the reproducibility contract; do not
// renumber.
enum class Substream : std::uint64_t {
    Traffic = 1,
    Channel = 2,
    Harq = 3,
    Policy = 4,
    Topology = 5,
};

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// seed' = splitmix(splitmix(splitmix(master) ^ id) ^ bs)
constexpr std::uint64_t derive_seed(std::uint64_t master, Substream id, std::uint64_t bs = 0) noexcept {
    return splitmix64(splitmix64(splitmix64(master) ^ static_cast<std::uint64_t>(id)) ^ bs);
}

using Rng = std::mt19937_64;

inline Rng make_stream(std::uint64_t master, Substream id, std::uint64_t bs = 0) {
    return Rng{derive_seed(master, id, bs)};
}

// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) noexcept {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Stateless counter-based uniform in (0, 1]. Used where a value must be a
// pure function of its coordinates (per-RB fading) so it can be evaluated
// lazily and in any order.
constexpr double counter_uniform(std::uint64_t key, std::uint64_t a, std::uint64_t b,
                                 std::uint64_t c, std::uint64_t d) noexcept {
    std::uint64_t h = splitmix64(key ^ a);
    h = splitmix64(h ^ b);
    h = splitmix64(h ^ c);
    h = splitmix64(h ^ d);
    return static_cast<double>((h >> 11) + 1) * 0x1.0p-53;
}

}  // namespace ranslice
