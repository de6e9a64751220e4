#pragma once

#include <optional>
#include <span>
#include <vector>

#include "lanesim/imaging.hpp"

namespace lanesim {

struct LaneBounds {
  int left_x;
  int right_x;

  friend bool operator==(const LaneBounds&, const LaneBounds&) = default;
};

struct LaneEstimate {
  double left_x = 0.0;  // near band
  double right_x = 0.0;
  double center_x = 0.0;
  double offset_px = 0.0;  // center_x - width/2, positive when the lane lies right of the midpoint
  double curvature = 0.0;  // px per row, positive when the lane drifts right going up the image
  bool valid = false;
  bool far_valid = false;  // false means curvature was not measured and reads 0
  double coverage = 0.0;   // ones fraction of the near band
};

struct LaneDetectorParams {
  RectRegion near_roi;
  RectRegion far_roi;
  int min_peak_count = 5;

  /// Default bands for an image of the given size: near rows [75%,100%),
  /// far rows [45%,70%), both full width.
  static LaneDetectorParams defaults(int width, int height);
  void validate(int width, int height) const;
};

/// Count of ones per column of roi; element j is column roi.x0 + j.
[[nodiscard]] std::vector<int> column_histogram(const BinaryMask& mask, const RectRegion& roi);

/// Splits hist at its midpoint and takes the argmax of each half, lowest index
/// on ties. Returned columns are hist indices plus x_offset. Empty when either
/// half peaks below min_peak_count.
[[nodiscard]] std::optional<LaneBounds> detect_lane_bounds(std::span<const int> hist,
                                                           int min_peak_count = 5,
                                                           int x_offset = 0);

[[nodiscard]] LaneEstimate estimate_lane(const BinaryMask& mask, const LaneDetectorParams& params);

}  // namespace lanesim
