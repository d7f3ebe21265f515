#pragma once

#include <cstdint>
#include <limits>

namespace tracial {

// SplitMix64 finalizer. Used both as a counter-based hash (substream
// derivation, tail bits) and as the state transition of SplitMix64 below.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

/// Seed of the substream `index` of stream `seed`. Trial i of any Monte Carlo
/// loop draws from derive_seed(seed, i), so results do not depend on how the
/// trials are scheduled across workers.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept {
  return mix64(seed ^ mix64(index * kGolden + 0x632be59bd9b4e019ULL));
}

/// Counter-based hash value `pos` of stream `seed`.
constexpr std::uint64_t hash_at(std::uint64_t seed, std::uint64_t pos) noexcept {
  return mix64(seed + (pos + 1) * kGolden);
}

/// SplitMix64; satisfies UniformRandomBitGenerator.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit constexpr SplitMix64(std::uint64_t seed = 0) noexcept : state_(seed) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  constexpr result_type operator()() noexcept {
    state_ += kGolden;
    return mix64(state_);
  }

 private:
  std::uint64_t state_;
};

/// Uniform double in [0,1) built from the top 53 bits, identical on every platform.
constexpr double to_unit(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

template <typename Gen>
double uniform01(Gen& gen) {
  return to_unit(gen());
}

}  // namespace tracial
