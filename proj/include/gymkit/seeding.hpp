#pragma once

#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

namespace gymkit {

/// splitmix64 (Steele, Lea, Flood). Used to expand a 64-bit seed into generator
/// state and to derive child seeds.
class SplitMix64 {
 public:
  explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  constexpr std::uint64_t next() noexcept {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

/// xoshiro256** 1.0 (Blackman, Vigna) with state expanded from a 64-bit seed by
/// splitmix64. This is the only generator in the library; every seeded
/// draw in spaces and environments goes through it, so trajectories are
/// bit-identical across platforms for integer draws and for the [0,1) mapping.
///
/// An Rng is single-owner state. Copying one forks the stream.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit constexpr Rng(std::uint64_t seed) noexcept {
    SplitMix64 expand(seed);
    for (auto& word : state_) word = expand.next();
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return ~std::uint64_t{0}; }

  constexpr result_type operator()() noexcept { return next(); }

  constexpr std::uint64_t next() noexcept {
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

  /// Uniform in [0, 1) from the top 53 bits.
  constexpr double next_double() noexcept {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  /// Uniform in [low, high).
  double uniform(double low, double high) noexcept { return low + (high - low) * next_double(); }

  /// Uniform integer in [0, bound), unbiased (Lemire's multiply-and-reject).
  std::uint64_t next_below(std::uint64_t bound) noexcept {
    if (bound == 0) return 0;
    unsigned __int128 m = static_cast<unsigned __int128>(next()) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        m = static_cast<unsigned __int128>(next()) * bound;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  /// Uniform integer in [low, high], inclusive.
  std::int64_t integer(std::int64_t low, std::int64_t high) noexcept {
    const auto span = static_cast<std::uint64_t>(high) - static_cast<std::uint64_t>(low);
    if (span == ~std::uint64_t{0}) return static_cast<std::int64_t>(next());
    return static_cast<std::int64_t>(static_cast<std::uint64_t>(low) + next_below(span + 1));
  }

  /// Standard normal via Box-Muller; consumes exactly two draws.
  double normal() noexcept {
    const double u1 = next_double();
    const double u2 = next_double();
    return std::sqrt(-2.0 * std::log1p(-u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  /// Standard exponential; consumes one draw.
  double exponential() noexcept { return -std::log1p(-next_double()); }

  const std::array<std::uint64_t, 4>& state() const noexcept { return state_; }

  friend bool operator==(const Rng&, const Rng&) = default;

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> state_{};
};

inline Rng rng_from_seed(std::uint64_t seed) noexcept { return Rng(seed); }

/// Child i is element i of the splitmix64 stream started at parent.
inline std::vector<std::uint64_t> derive_child_seeds(std::uint64_t parent, std::size_t n) {
  std::vector<std::uint64_t> seeds(n);
  SplitMix64 stream(parent);
  for (auto& s : seeds) s = stream.next();
  return seeds;
}

/// Seed used when the caller never supplies one. Not reproducible.
inline std::uint64_t wall_clock_seed() noexcept {
  const auto ticks = std::chrono::high_resolution_clock::now().time_since_epoch().count();
  return SplitMix64(static_cast<std::uint64_t>(ticks)).next();
}

}  // namespace gymkit
