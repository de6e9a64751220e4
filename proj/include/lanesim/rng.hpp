#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <span>
#include <vector>

namespace lanesim::rng {

// Distributions from <random> are implementation-defined, so everything that
// must be reproducible across toolchains draws through these helpers instead.

/// Uniform double in [0, 1) from the top 53 bits.
inline double uniform01(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

/// Unbiased integer in [0, bound) by rejection.
inline std::uint64_t below(std::mt19937_64& gen, std::uint64_t bound) {
  if (bound <= 1) return 0;
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x = gen();
  while (x >= limit) x = gen();
  return x % bound;
}

/// Standard normal draw (Box-Muller, one value per call).
inline double normal(std::mt19937_64& gen) {
  double u1 = uniform01(gen);
  while (u1 <= 0.0) u1 = uniform01(gen);
  const double u2 = uniform01(gen);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

/// Fisher-Yates shuffle with a portable index draw.
template <typename T>
void shuffle(std::span<T> items, std::mt19937_64& gen) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(below(gen, i));
    std::swap(items[i - 1], items[j]);
  }
}

/// Pre-drawn block of standard normals. Frames sample a random window out of
/// it, which keeps per-frame noise cheap while staying seed-determined.
class NoiseBank {
 public:
  NoiseBank(std::uint64_t seed, std::size_t size) : values_(size) {
    std::mt19937_64 gen(seed);
    for (auto& v : values_) v = static_cast<float>(normal(gen));
  }

  [[nodiscard]] std::span<const float> values() const noexcept { return values_; }

 private:
  std::vector<float> values_;
};

}  // namespace lanesim::rng
