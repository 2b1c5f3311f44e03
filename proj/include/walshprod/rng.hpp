#pragma once

#include <cstdint>
#include <string_view>

namespace walshprod {

// Counter-based generator: output(seed, c) = splitmix64_mix(seed + (c + 1) * kGolden).
// Any draw is addressable by (seed, counter), so datasets and trials can be
// produced in any order or in parallel and still be bit-identical.
inline constexpr std::string_view kRngAlgorithm = "splitmix64-counter-v1";

// seed_t = splitmix64_mix((master ^ kTrialDomain) + (t + 1) * kGolden)
inline constexpr std::string_view kTrialSeedMixing =
    "splitmix64_mix((master ^ 0xD1B54A32D192ED03) + (t + 1) * 0x9E3779B97F4A7C15)";

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
inline constexpr std::uint64_t kTrialDomain = 0xD1B54A32D192ED03ULL;

constexpr std::uint64_t splitmix64_mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

class CounterRng {
 public:
  explicit constexpr CounterRng(std::uint64_t seed) : seed_(seed) {}

  constexpr std::uint64_t seed() const { return seed_; }

  constexpr std::uint64_t at(std::uint64_t counter) const {
    return splitmix64_mix(seed_ + (counter + 1) * kGolden);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  constexpr double uniform01(std::uint64_t counter) const {
    return static_cast<double>(at(counter) >> 11) * 0x1.0p-53;
  }

 private:
  std::uint64_t seed_;
};

constexpr std::uint64_t derive_trial_seed(std::uint64_t master_seed, std::uint64_t trial) {
  return splitmix64_mix((master_seed ^ kTrialDomain) + (trial + 1) * kGolden);
}

}  // namespace walshprod
