#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <random>

namespace aba {

// Stream tags keep the environment and the policies on disjoint streams.
enum class Stream : std::uint64_t {
    Environment = 0x454e56,
    Policy = 0x504f4c,
    Datagen = 0x47454e,
};

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Counter-based key: the same (seed, stream, campaign, day) always yields the
// same generator, independent of how many draws other campaigns consumed.
inline constexpr std::uint64_t stream_key(std::uint64_t seed, Stream stream, std::uint64_t campaign,
                                          std::uint64_t day) {
    std::uint64_t h = splitmix64(seed);
    for (std::uint64_t part : {static_cast<std::uint64_t>(stream), campaign, day}) {
        h = splitmix64(h ^ part);
    }
    return h;
}

// SplitMix64 as a UniformRandomBitGenerator.
class SplitMix64 {
  public:
    using result_type = std::uint64_t;

    explicit constexpr SplitMix64(std::uint64_t state = 0) : state_(state) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    constexpr result_type operator()() {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

  private:
    std::uint64_t state_;
};

inline SplitMix64 make_stream(std::uint64_t seed, Stream stream, std::uint64_t campaign, std::uint64_t day) {
    return SplitMix64(stream_key(seed, stream, campaign, day));
}

// Uniform in [0, 1) with 53 random bits.
template <typename Rng>
double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Box-Muller; written out so draws are identical across standard libraries.
template <typename Rng>
double standard_normal(Rng& rng) {
    constexpr double two_pi = 6.283185307179586476925286766559;
    double u1 = uniform01(rng);
    while (u1 <= 0.0) {
        u1 = uniform01(rng);
    }
    const double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
}

} // namespace aba
