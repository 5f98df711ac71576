#pragma once

#include <cstdint>
#include <cmath>

namespace bgw {

// Counter-based 64-bit generator (SplitMix64 finalizer over seed + counter).
// State is the pair (seed, counter); every draw is a pure hash of it, so a
// stream can be replayed, forked, or partitioned deterministically:
//   - next_u64() hashes (seed, counter) and increments the counter;
//   - split(i) derives an independent stream with seed' = hash(seed, i),
//     used to give replicas / spine branches their own reproducible streams.
class RngState {
public:
    explicit RngState(std::uint64_t seed = 0, std::uint64_t counter = 0)
        : seed_(seed), counter_(counter) {}

    std::uint64_t next_u64() {
        std::uint64_t z = seed_ + (counter_++) * 0x9e3779b97f4a7c15ull;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1) with 53 random bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform in {0, ..., n-1}; unbiased by rejection on the top range.
    std::uint64_t below(std::uint64_t n) {
        if (n <= 1) return 0;
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = next_u64();
        } while (x >= limit);
        return x % n;
    }

    // Geometric number of failures before the first success: P(k) = (1-q) q^k.
    // q in [0, 1); inverse-CDF, one uniform per draw.
    std::uint64_t geometric_failures(double q) {
        if (q <= 0.0) return 0;
        double u = next_double();
        // Guard u == 0 to keep log finite; the event has probability 2^-53.
        if (u <= 0.0) u = 0x1.0p-53;
        return static_cast<std::uint64_t>(std::floor(std::log(u) / std::log(q)));
    }

    RngState split(std::uint64_t stream) const {
        RngState h(seed_, 0x5851f42d4c957f2dull ^ stream);
        return RngState(h.next_u64(), 0);
    }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t counter() const { return counter_; }

private:
    std::uint64_t seed_;
    std::uint64_t counter_;
};

}  // namespace bgw
