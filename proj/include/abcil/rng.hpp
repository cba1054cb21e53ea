#pragma once

#include <cstdint>
#include <limits>

namespace abcil {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Seed for the `index`-th draw of a batch started from `master`. Depends
/// only on (master, index), so results do not depend on which worker
/// processes which draw.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept
{
    return mix64(master ^ mix64(index ^ 0xD1B54A32D192ED03ULL));
}

/// xoshiro256** (Blackman and Vigna). Every simulation gets its own engine,
/// so seeding must be cheap: the Mersenne Twister's 2.5 KB state costs more
/// to initialize than a whole Poisson-model simulation.
class Rng
{
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed) noexcept
    {
        // Fill the state from a SplitMix64 stream, as the authors recommend.
        std::uint64_t x = seed;
        for (auto& s : s_) {
            x += 0x9E3779B97F4A7C15ULL;
            std::uint64_t z = x;
            z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
            z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
            s = z ^ (z >> 31);
        }
    }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept
    {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept { return (x << k) | (x >> (64 - k)); }

    std::uint64_t s_[4];
};

inline Rng make_rng(std::uint64_t seed)
{
    return Rng{mix64(seed)};
}

/// Uniform draw on the open interval (0, 1).
inline double uniform_open(Rng& rng)
{
    // 53 random bits, offset by half an ulp so 0 is never produced.
    return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

} // namespace abcil
