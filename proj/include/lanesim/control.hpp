#pragma once

#include "lanesim/lane.hpp"

namespace lanesim {

/// Gains of the bounded linear steering law. Positive angles steer right.
struct SteeringParams {
  double k_offset = 50.0;  // deg per unit normalized offset (offset / half width)
  double k_curv = 28.0;    // deg per px/row of curvature
  double theta_max = 30.0;
  double alpha = 0.4;  // EMA weight of the newest raw command
  int hold_frames = 5;

  void validate() const;
};

struct SteeringCommand {
  double raw_deg = 0.0;
  double smoothed_deg = 0.0;
  bool lane_lost = false;
};

/// clamp(k_offset * offset/(width/2) + k_curv * curvature, +-theta_max).
/// Requires est.valid.
[[nodiscard]] double steering_law(const LaneEstimate& est, int width, const SteeringParams& p);

[[nodiscard]] constexpr double smooth(double prev_smoothed, double raw, double alpha) noexcept {
  return alpha * raw + (1.0 - alpha) * prev_smoothed;
}

/// Stateful steering controller: law + EMA while the lane is visible; when it
/// is lost, hold the last smoothed command for hold_frames frames, then decay
/// it toward zero at the EMA rate.
class SteeringController {
 public:
  explicit SteeringController(SteeringParams params);

  SteeringCommand step(const LaneEstimate& est, int width);
  void reset() noexcept;

  [[nodiscard]] const SteeringParams& params() const noexcept { return params_; }
  [[nodiscard]] double smoothed() const noexcept { return smoothed_; }

 private:
  SteeringParams params_;
  double smoothed_ = 0.0;
  int lost_frames_ = 0;
};

}  // namespace lanesim
