#pragma once

// Deterministic, splittable random number generation. The standard engines
// are portable but the standard distributions are not, so every draw used by
// the generators and samplers is implemented here directly: instance corpora
// and experiment records then reproduce bit-for-bit on any platform.
// Core generator: xoshiro256++, seeded through splitmix64.

#include <array>
#include <cstdint>
#include <stdexcept>

namespace klqs {

namespace detail {

constexpr std::uint64_t splitmix64_next(std::uint64_t& state)
{
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t rotl64(std::uint64_t x, int s)
{
    return (x << s) | (x >> (64 - s));
}

} // namespace detail

// Stable seed derivation for nested experiment streams: one master seed plus
// a (cell, instance) pair maps to the seed of an independent child stream,
// independent of scheduling order or thread count.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0)
{
    std::uint64_t s = seed;
    detail::splitmix64_next(s);
    s ^= 0x9E3779B97F4A7C15ULL * (a + 1);
    detail::splitmix64_next(s);
    s ^= 0x9E3779B97F4A7C15ULL * (b + 1);
    return detail::splitmix64_next(s);
}

class SplitRng {
public:
    explicit SplitRng(std::uint64_t seed) : seed_(seed)
    {
        std::uint64_t sm = seed;
        for (auto& word : state_)
            word = detail::splitmix64_next(sm);
    }

    std::uint64_t seed() const { return seed_; }

    // Independent child stream; children of distinct indices (and the parent)
    // occupy unrelated splitmix64 orbits.
    SplitRng fork(std::uint64_t stream) const
    {
        return SplitRng(derive_seed(seed_, stream));
    }

    // xoshiro256++ step.
    std::uint64_t next()
    {
        const std::uint64_t result = detail::rotl64(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = detail::rotl64(state_[3], 45);
        return result;
    }

    // Uniform on [0, bound), unbiased via rejection.
    std::uint64_t bounded(std::uint64_t bound)
    {
        if (bound == 0)
            throw std::invalid_argument("SplitRng::bounded: bound must be positive");
        const std::uint64_t threshold = (0 - bound) % bound;  // 2^64 mod bound
        for (;;) {
            const std::uint64_t r = next();
            if (r >= threshold)
                return r % bound;
        }
    }

    // Uniform double in [0, 1) with 53 significant bits.
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    bool coin() { return (next() >> 63) != 0; }

private:
    std::uint64_t seed_;
    std::array<std::uint64_t, 4> state_;
};

} // namespace klqs
