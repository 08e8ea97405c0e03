#pragma once

// Random streams used throughout the simulator.
//
// Two kinds of generators are provided:
//  * Rng, a sequential SplitMix64 stream. Cheap to construct, so the
//    evolution engine derives a fresh stream per (seed, step, channel).
//  * counter draws, a stateless hash of (key, id). SIR uses these so that
//    each Bernoulli trial is a pure function of the node identities involved,
//    which is what makes engine-on/engine-off runs couple exactly.
//
// Bounded integers and uniforms are computed here rather than through
// <random> distributions so streams are identical across standard libraries.

#include <cstdint>

namespace searchnet {

/// SplitMix64 increment.
inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

/// Murmur3 64-bit finalizer.
constexpr std::uint64_t fmix64(std::uint64_t h) noexcept {
    h ^= h >> 33;
    h *= 0xFF51AFD7ED558CCDULL;
    h ^= h >> 33;
    h *= 0xC4CEB9FE1A85EC53ULL;
    h ^= h >> 33;
    return h;
}

/// Derive an independent 64-bit seed from a parent seed and an index.
constexpr std::uint64_t mix_seed(std::uint64_t parent, std::uint64_t index) noexcept {
    return fmix64(fmix64(parent + kGolden) ^ (index * 0xD6E8FEB86659FD93ULL + 0x2545F4914F6CDD1DULL));
}

/// Stateless draw: the hash of `id` under `key`. The SIMD kernels replicate
/// this exactly.
constexpr std::uint64_t counter_hash(std::uint64_t key, std::uint32_t id) noexcept {
    return fmix64(key + static_cast<std::uint64_t>(id) * kGolden);
}

/// Map 64 random bits to [0, 1) using the top 52 bits as a mantissa.
double bits_to_unit(std::uint64_t bits) noexcept;

inline double counter_uniform(std::uint64_t key, std::uint32_t id) noexcept {
    return bits_to_unit(counter_hash(key, id));
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) noexcept : state_(seed) {}

    std::uint64_t next() noexcept {
        std::uint64_t z = (state_ += kGolden);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1).
    double uniform() noexcept { return bits_to_unit(next()); }

    /// Uniform integer in [0, bound). Unbiased (Lemire). bound must be > 0.
    std::uint64_t below(std::uint64_t bound) noexcept;

    bool bernoulli(double p) noexcept { return uniform() < p; }

    std::uint64_t state() const noexcept { return state_; }

private:
    std::uint64_t state_;
};

}  // namespace searchnet
