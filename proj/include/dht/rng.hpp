#pragma once

#include <cstdint>

namespace dht {

/**
 * Deterministic counter-based random stream built on SplitMix64.
 *
 * SplitMix64 (Steele, Lea & Flood 2014; the finalizer popularized by Vigna's
 * splitmix64.c) advances a 64-bit counter by the golden-gamma constant and
 * scrambles it with two xor-shift-multiply rounds.  Because the output is a
 * pure function of (initial key, draw index), streams are trivially
 * splittable: any tuple of identifiers can be hashed into an independent
 * stream key, and the same tuple always reproduces the same sequence on any
 * platform.
 *
 * The simulator derives one stream per purpose:
 *   - sensor readings:      key (seed, observer id, target id, step)
 *   - adversary broadcasts: key (seed, agent id, kAdversaryStream, step)
 *
 * Every stream is independent of the algorithm/fusion-rule under test, so
 * paired runs on the same seed consume identical observation sequences.
 */
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t key) : state_(key) {}

    // Builds a stream keyed by up to four identifiers.  The key derivation
    // chains the scrambler over each component so that distinct tuples map to
    // well-separated stream keys.
    static SplitMix64 stream(std::uint64_t seed, std::uint64_t a = 0,
                             std::uint64_t b = 0, std::uint64_t c = 0) {
        std::uint64_t k = scramble(seed + kGamma);
        k = scramble(k ^ (a + kGamma));
        k = scramble(k ^ (b + kGamma));
        k = scramble(k ^ (c + kGamma));
        return SplitMix64(k);
    }

    std::uint64_t next_u64() {
        state_ += kGamma;
        return scramble(state_);
    }

    // Uniform double in [0, 1), using the top 53 bits (full mantissa width).
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Core SplitMix64 finalizer.
    static std::uint64_t scramble(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

private:
    static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL; // 2^64 / phi

    std::uint64_t state_;
};

// Reserved "target" slot for streams that are not tied to a target agent
// (e.g. adversarial broadcast draws).
inline constexpr std::uint64_t kAdversaryStream = 0xFFFFFFFFFFFFFFFFULL;

} // namespace dht
