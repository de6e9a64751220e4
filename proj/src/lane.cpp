#include "lanesim/lane.hpp"

#include <cmath>

#include "lanesim/error.hpp"

namespace lanesim {

LaneDetectorParams LaneDetectorParams::defaults(int width, int height) {
  auto row = [height](double frac) { return static_cast<int>(std::lround(frac * height)); };
  return {RectRegion{0, row(0.75), width, height}, RectRegion{0, row(0.45), width, row(0.70)}, 5};
}

void LaneDetectorParams::validate(int width, int height) const {
  if (!near_roi.within(width, height) || !far_roi.within(width, height)) {
    throw ConfigError("lane ROI bands must lie inside the warped image");
  }
  if (far_roi.y1 > near_roi.y0) {
    throw ConfigError("far ROI band must lie strictly above the near band without overlap");
  }
  if (min_peak_count < 0) throw ConfigError("min_peak_count must be non-negative");
}

std::vector<int> column_histogram(const BinaryMask& mask, const RectRegion& roi) {
  if (roi.empty()) throw InvalidInput("column_histogram: empty roi");
  if (!roi.within(mask.width(), mask.height())) {
    throw InvalidInput("column_histogram: roi out of bounds");
  }
  std::vector<int> hist(static_cast<std::size_t>(roi.width()), 0);
  const auto bits = mask.bits();
  for (int y = roi.y0; y < roi.y1; ++y) {
    const auto* row = bits.data() + static_cast<std::size_t>(y) * mask.width() + roi.x0;
    for (std::size_t j = 0; j < hist.size(); ++j) hist[j] += row[j];
  }
  return hist;
}

std::optional<LaneBounds> detect_lane_bounds(std::span<const int> hist, int min_peak_count,
                                             int x_offset) {
  const std::size_t mid = hist.size() / 2;
  if (mid == 0) return std::nullopt;
  auto argmax = [&](std::size_t begin, std::size_t end) {
    std::size_t best = begin;
    for (std::size_t i = begin + 1; i < end; ++i) {
      if (hist[i] > hist[best]) best = i;
    }
    return best;
  };
  const std::size_t left = argmax(0, mid);
  const std::size_t right = argmax(mid, hist.size());
  if (hist[left] < min_peak_count || hist[right] < min_peak_count) return std::nullopt;
  return LaneBounds{static_cast<int>(left) + x_offset, static_cast<int>(right) + x_offset};
}

LaneEstimate estimate_lane(const BinaryMask& mask, const LaneDetectorParams& params) {
  params.validate(mask.width(), mask.height());
  LaneEstimate est;
  est.coverage = mask_coverage(mask, params.near_roi);

  const auto near_hist = column_histogram(mask, params.near_roi);
  const auto near = detect_lane_bounds(near_hist, params.min_peak_count, params.near_roi.x0);
  if (!near) return est;

  est.valid = true;
  est.left_x = near->left_x;
  est.right_x = near->right_x;
  est.center_x = 0.5 * (near->left_x + near->right_x);
  est.offset_px = est.center_x - 0.5 * mask.width();

  const auto far_hist = column_histogram(mask, params.far_roi);
  const auto far = detect_lane_bounds(far_hist, params.min_peak_count, params.far_roi.x0);
  if (far) {
    const double far_center = 0.5 * (far->left_x + far->right_x);
    const double near_row = 0.5 * (params.near_roi.y0 + params.near_roi.y1);
    const double far_row = 0.5 * (params.far_roi.y0 + params.far_roi.y1);
    est.curvature = (far_center - est.center_x) / (near_row - far_row);
    est.far_valid = true;
  }
  return est;
}

}  // namespace lanesim
