#pragma once

#include <cstdint>

namespace bc {

// splitmix64, used for seeding and for deriving independent streams.
inline std::uint64_t splitmix64(std::uint64_t& s) {
    std::uint64_t z = (s += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// xoshiro256** by Blackman & Vigna. Seedable, 64-bit, identical output on
// every platform. Uniform doubles are built from the top 53 bits, so the
// stream is reproducible bit-for-bit independent of libc distributions.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 1) { reseed(seed); }

    void reseed(std::uint64_t seed) {
        std::uint64_t s = seed;
        for (auto& w : state_) w = splitmix64(s);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // uniform in [0,1)
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform() < p; }

    // uniform integer in [0, n)
    std::uint64_t below(std::uint64_t n) {
        // rejection-free modulo is biased for huge n; n here is small
        std::uint64_t threshold = (~n + 1) % n;
        for (;;) {
            std::uint64_t r = next_u64();
            if (r >= threshold) return r % n;
        }
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::uint64_t state_[4];
};

// Derives the seed of an independent stream from (seed, index, purpose).
inline std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t index, std::uint64_t purpose = 0) {
    std::uint64_t s = seed ^ (0x6a09e667f3bcc909ULL + purpose);
    splitmix64(s);
    s ^= 0x3c6ef372fe94f82bULL * (index + 1);
    std::uint64_t out = splitmix64(s);
    out ^= splitmix64(s);
    return out ? out : 0x9e3779b97f4a7c15ULL;
}

}  // namespace bc
