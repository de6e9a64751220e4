#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "lanesim/imaging.hpp"

namespace lanesim::signeval {

/// Horizontal box kernel of length k, clamped at the image edges. For even k
/// the window covers k/2 pixels to the left and k/2 - 1 to the right.
struct MotionBlur {
  int k = 1;
};

/// Added in HSV: hue in degrees (wraps), saturation and value as fractions
/// (clamped to [0,1]).
struct ColorShift {
  double dh = 0.0;
  double ds = 0.0;
  double dv = 0.0;
};

/// Per-channel Gaussian noise; sigma is a fraction of full scale (255).
struct GaussianNoise {
  double sigma = 0.0;
};

using Perturbation = std::variant<MotionBlur, ColorShift, GaussianNoise>;

void validate(const Perturbation& p);

/// RGB8 in, RGB8 out; results are rounded half up and clamped to [0,255].
[[nodiscard]] Frame perturb(const Frame& rgb, const Perturbation& p, std::uint64_t seed);

/// Applies perturbations in order; step i draws from seed + i.
[[nodiscard]] Frame perturb_all(const Frame& rgb, std::span<const Perturbation> ps,
                                std::uint64_t seed);

/// Parses "motion_blur=K,noise=S,color=H:S:V" (any subset, any order).
[[nodiscard]] std::vector<Perturbation> parse_perturbations(std::string_view text);
[[nodiscard]] std::string to_string(std::span<const Perturbation> ps);

}  // namespace lanesim::signeval
