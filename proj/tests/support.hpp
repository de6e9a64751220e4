#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

#include "lanesim/imaging.hpp"
#include "lanesim/rng.hpp"

namespace testing {

inline constexpr int kPropertyCases = 1000;

inline double uniform(std::mt19937_64& g, double lo, double hi) {
  return lo + (hi - lo) * lanesim::rng::uniform01(g);
}

inline int uniform_int(std::mt19937_64& g, int lo, int hi) {  // inclusive
  return lo + static_cast<int>(lanesim::rng::below(g, static_cast<std::uint64_t>(hi - lo + 1)));
}

inline lanesim::Frame random_rgb(std::mt19937_64& g, int w, int h) {
  lanesim::Frame f(w, h, lanesim::PixelFormat::rgb8);
  for (auto& v : f.data()) v = static_cast<float>(uniform_int(g, 0, 255));
  return f;
}

inline lanesim::BinaryMask random_mask(std::mt19937_64& g, int w, int h, double p = 0.5) {
  lanesim::BinaryMask m(w, h);
  for (auto& b : m.bits()) b = lanesim::rng::uniform01(g) < p ? 1 : 0;
  return m;
}

// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("lanesim_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace testing
