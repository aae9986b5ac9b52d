#pragma once

// Reproducible randomness.
//
// Every stream is SplitMix64 (Steele, Lea, Flood 2014) with its published
// constants, so a reimplementation in any language reproduces the exact
// sequence:
//
//   state += 0x9E3779B97F4A7C15
//   z = state
//   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//   return z ^ (z >> 31)
//
// Child streams are keyed by derive_seed(seed, index) =
//   mix64(seed ^ mix64(index + 0x9E3779B97F4A7C15))
// where mix64 is the output finalizer above applied to its argument.
//
// Bounded integers use Lemire's multiply-shift with rejection (exactly
// uniform); Bernoulli(p) compares a raw draw against floor(p * 2^64).

#include <cstdint>
#include <limits>

namespace spsing {

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept {
    return mix64(seed ^ mix64(index + kGoldenGamma));
}

class SplitMix64 {
  public:
    using result_type = std::uint64_t;

    constexpr explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    constexpr result_type operator()() noexcept {
        state_ += kGoldenGamma;
        return mix64(state_);
    }

    /// Uniform integer in [0, range). range must be nonzero.
    constexpr std::uint64_t bounded(std::uint64_t range) noexcept {
        std::uint64_t x = (*this)();
        unsigned __int128 m = static_cast<unsigned __int128>(x) * range;
        auto low = static_cast<std::uint64_t>(m);
        if (low < range) {
            std::uint64_t threshold = (0 - range) % range;
            while (low < threshold) {
                x = (*this)();
                m = static_cast<unsigned __int128>(x) * range;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    constexpr bool coin() noexcept { return ((*this)() >> 63) != 0; }

    constexpr std::uint64_t state() const noexcept { return state_; }

  private:
    std::uint64_t state_;
};

}  // namespace spsing
