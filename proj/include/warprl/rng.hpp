#pragma once
#include <cstdint>

namespace warprl {

/// xoshiro256++ generator with splitmix64 seeding.
///
/// Self-contained so that streams are bit-identical across platforms and
/// standard-library versions; all stochastic behavior in the harness flows
/// through this type.
class Rng {
public:
    explicit Rng(uint64_t seed) {
        uint64_t x = seed;
        for (auto& w : s_) w = splitmix64(x);
    }

    uint64_t next_u64() {
        uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1).
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform double in [a, b).
    double uniform(double a, double b) { return a + (b - a) * next_double(); }

    /// Uniform integer in [0, n). n must be positive.
    int uniform_int(int n) {
        // Lemire's multiply-shift with rejection for exact uniformity.
        uint64_t range = static_cast<uint64_t>(n);
        uint64_t x = next_u64();
        __uint128_t m = static_cast<__uint128_t>(x) * range;
        uint64_t low = static_cast<uint64_t>(m);
        if (low < range) {
            uint64_t threshold = (0 - range) % range;
            while (low < threshold) {
                x = next_u64();
                m = static_cast<__uint128_t>(x) * range;
                low = static_cast<uint64_t>(m);
            }
        }
        return static_cast<int>(m >> 64);
    }

    /// Derive an independent child seed from this stream.
    uint64_t split() { return next_u64(); }

private:
    static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    static uint64_t splitmix64(uint64_t& x) {
        x += 0x9e3779b97f4a7c15ull;
        uint64_t z = x;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    uint64_t s_[4];
};

}  // namespace warprl
