#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <vector>

#include "lanesim/signeval/dataset.hpp"

namespace lanesim::signeval {

struct SyntheticSignParams {
  int size = 32;
  double noise_sigma = 0.02;  // fraction of full scale
};

/// One image of class id (LabelSet::traffic_signs order): a saturated shape
/// with a class-specific hue on a gray background, or for "None" a gray
/// shape on gray. Gaussian noise on top.
[[nodiscard]] Frame synthetic_sign(int class_id, std::mt19937_64& gen,
                                   const SyntheticSignParams& p = {});

/// per_class images of every class, classes in id order, from one generator.
[[nodiscard]] std::vector<LabeledImage> synthetic_sign_set(int per_class, std::uint64_t seed,
                                                           const SyntheticSignParams& p = {});

/// Writes synthetic_sign_set to <root>/<class>/img_NNNN.ppm.
void write_synthetic_dataset(const std::filesystem::path& root, int per_class, std::uint64_t seed,
                             const SyntheticSignParams& p = {});

}  // namespace lanesim::signeval
