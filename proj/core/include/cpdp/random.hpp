#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace cpdp {

// splitmix64 finalizer. Used both as the seed-mixing function and to
// whiten tag hashes when deriving named sub-streams.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Derives the seed of a named sub-stream: FNV-1a over the tag folded
// into the parent seed, then finalized with splitmix64. Tags are part
// of the reproducibility contract and are echoed into the manifest.
inline std::uint64_t derive_seed(std::uint64_t parent, std::string_view tag) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : tag) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return splitmix64(parent ^ h);
}

// Seeded random stream with portable draw semantics. std::mt19937_64 is
// fully specified by the standard; the distributions below are written
// out so that a given seed yields the same draw sequence on every
// platform (std::uniform_*_distribution makes no such promise).
class RandomStream {
public:
    RandomStream() : engine_(0) {}
    explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform double in [0, 1) with 53 random bits.
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform integer in [0, bound). Rejection sampling keeps it unbiased.
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
        std::uint64_t v = next_u64();
        while (v >= limit) v = next_u64();
        return v % bound;
    }

    // Standard normal via Box-Muller; consumes exactly two uniforms.
    double gaussian() {
        double u1 = uniform();
        double u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();  // log(0) guard; astronomically rare
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
    }

    bool bernoulli(double p) { return uniform() < p; }

private:
    std::mt19937_64 engine_;
};

}  // namespace cpdp
