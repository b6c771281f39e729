#pragma once

// xoshiro256** seeded through splitmix64. Stream discipline: substream s of
// seed derives its four state words from a splitmix64 chain started at
// seed XOR (s+1)*0x9E3779B97F4A7C15, so a (seed, stream) pair always names
// the same sequence; parallel samplers give worker t substream t.

#include <cstdint>

namespace ratq {

class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) {
        std::uint64_t x = seed ^ ((stream + 1) * 0x9E3779B97F4A7C15ull);
        for (auto& word : state_) word = splitmix(x);
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~0ull; }

    result_type operator()() {
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

    // Uniform on [0,1) with 53 random bits.
    double uniform01() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    // Unbiased integer on [0, n) (multiply-shift with rejection).
    std::uint64_t below(std::uint64_t n) {
        std::uint64_t x = (*this)();
        unsigned __int128 product = static_cast<unsigned __int128>(x) * n;
        std::uint64_t low = static_cast<std::uint64_t>(product);
        if (low < n) {
            const std::uint64_t cutoff = (0 - n) % n;
            while (low < cutoff) {
                x = (*this)();
                product = static_cast<unsigned __int128>(x) * n;
                low = static_cast<std::uint64_t>(product);
            }
        }
        return static_cast<std::uint64_t>(product >> 64);
    }

    static constexpr const char* algorithm() { return "xoshiro256** / splitmix64"; }

private:
    static std::uint64_t splitmix(std::uint64_t& x) {
        std::uint64_t r = (x += 0x9E3779B97F4A7C15ull);
        r = (r ^ (r >> 30)) * 0xBF58476D1CE4E5B9ull;
        r = (r ^ (r >> 27)) * 0x94D049BB133111EBull;
        return r ^ (r >> 31);
    }

    static std::uint64_t rotl(std::uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }

    std::uint64_t state_[4];
};

}  // namespace ratq
