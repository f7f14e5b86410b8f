#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace ledgerprint {

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline uint64_t fnv1a64(std::string_view s) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Derives an independent stream seed from a base seed and a stream id.
/// Used everywhere a single user-facing seed has to feed several unrelated
/// random processes (per-device phase, delays, shuffles, ...).
inline uint64_t derive_seed(uint64_t seed, uint64_t stream) {
    return splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x6a09e667f3bcc909ULL));
}

inline uint64_t derive_seed(uint64_t seed, std::string_view tag) {
    return derive_seed(seed, fnv1a64(tag));
}

inline uint64_t derive_seed(uint64_t seed, std::string_view tag, uint64_t a) {
    return derive_seed(derive_seed(seed, tag), a);
}

inline uint64_t derive_seed(uint64_t seed, std::string_view tag, uint64_t a, uint64_t b) {
    return derive_seed(derive_seed(derive_seed(seed, tag), a), b);
}

/// Deterministic random source. mt19937_64 is fully specified by the
/// standard, and uniform doubles are produced from raw bits directly, so a
/// given seed yields the same stream on every platform.
class Rng {
public:
    explicit Rng(uint64_t seed) : gen_(seed) {}

    uint64_t next() { return gen_(); }

    /// Uniform double in [0, 1).
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Unbiased uniform integer in [0, n). n must be > 0.
    uint64_t below(uint64_t n) {
        __uint128_t m = static_cast<__uint128_t>(gen_()) * n;
        auto lo = static_cast<uint64_t>(m);
        if (lo < n) {
            const uint64_t t = (0 - n) % n;
            while (lo < t) {
                m = static_cast<__uint128_t>(gen_()) * n;
                lo = static_cast<uint64_t>(m);
            }
        }
        return static_cast<uint64_t>(m >> 64);
    }

    /// Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[below(i)]);
        }
    }

private:
    std::mt19937_64 gen_;
};

}  // namespace ledgerprint
