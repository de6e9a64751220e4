#pragma once

#include <span>

#include "lanesim/imaging.hpp"

namespace lanesim {

struct LabeledFrame {
  Frame image;  // RGB8 or HSV
  BinaryMask truth;
};

/// Search grid. Candidate bounds sit on bin edges: hue edges every
/// 360/hue_bins degrees, saturation and value edges every 1/bins.
struct CalibrationGrid {
  int hue_bins = 90;
  int sat_bins = 25;
  int val_bins = 25;
  int coarse_hue_step = 6;  // in bins
  int coarse_sv_step = 5;

  void validate() const;
};

struct CalibrationResult {
  HsvThreshold thresholds;
  double mean_iou = 0.0;
};

/// Intersection over union of the ones of two equally sized masks; 1 when
/// both are empty.
[[nodiscard]] double mask_iou(const BinaryMask& a, const BinaryMask& b);

/// Mean over frames of mask_iou(threshold_mask(frame), truth).
[[nodiscard]] double mean_iou(std::span<const LabeledFrame> frames, const HsvThreshold& t);

/// Coarse grid over all six bounds, then coordinate descent one bin at a
/// time until no bound improves the mean IoU. Ties keep the earlier candidate.
[[nodiscard]] CalibrationResult calibrate_thresholds(std::span<const LabeledFrame> frames,
                                                     const CalibrationGrid& grid = {});

}  // namespace lanesim
