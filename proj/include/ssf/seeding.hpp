#pragma once

#include <cstdint>
#include <limits>

namespace ssf::seeding {

inline constexpr std::uint64_t golden_gamma = 0x9E3779B97F4A7C15ULL;
inline constexpr std::uint64_t site_gamma = 0xD1B54A32D192ED03ULL;

/// splitmix64 output function (Stafford mix 13).
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Seed of one realization. A pure function of (master, realization), so a
/// realization draws the same couplings whichever worker evaluates it.
constexpr std::uint64_t realization_seed(std::uint64_t master, std::uint64_t realization) noexcept {
  return mix64(mix64(master + golden_gamma) ^ ((realization + 1) * golden_gamma));
}

/// Random bits for the coupling at one site of one realization.
constexpr std::uint64_t site_bits(std::uint64_t realization_seed, std::uint64_t site) noexcept {
  return mix64(realization_seed ^ mix64((site + 1) * site_gamma));
}

/// Top 53 bits mapped to [0, 1).
constexpr double unit_interval(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Counter-based splitmix64 engine; satisfies UniformRandomBitGenerator.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed = 0) noexcept : state_(seed) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    state_ += golden_gamma;
    return mix64(state_);
  }

  double uniform() noexcept { return unit_interval((*this)()); }
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

 private:
  std::uint64_t state_;
};

}  // namespace ssf::seeding
