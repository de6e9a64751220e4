#include "lanesim/control.hpp"

#include <algorithm>

#include "lanesim/error.hpp"

namespace lanesim {

void SteeringParams::validate() const {
  if (!(theta_max > 0.0)) throw ConfigError("theta_max must be positive");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ConfigError("alpha must lie in (0, 1]");
  if (hold_frames < 0) throw ConfigError("hold_frames must be non-negative");
}

double steering_law(const LaneEstimate& est, int width, const SteeringParams& p) {
  if (!est.valid) throw InvalidInput("steering_law: lane estimate is not valid");
  if (width <= 0) throw InvalidInput("steering_law: width must be positive");
  const double normalized = est.offset_px / (0.5 * width);
  const double raw = p.k_offset * normalized + p.k_curv * est.curvature;
  return std::clamp(raw, -p.theta_max, p.theta_max);
}

SteeringController::SteeringController(SteeringParams params) : params_(params) {
  params_.validate();
}

void SteeringController::reset() noexcept {
  smoothed_ = 0.0;
  lost_frames_ = 0;
}

SteeringCommand SteeringController::step(const LaneEstimate& est, int width) {
  SteeringCommand cmd;
  if (est.valid) {
    lost_frames_ = 0;
    cmd.raw_deg = steering_law(est, width, params_);
    smoothed_ = smooth(smoothed_, cmd.raw_deg, params_.alpha);
  } else {
    cmd.lane_lost = true;
    ++lost_frames_;
    if (lost_frames_ <= params_.hold_frames) {
      cmd.raw_deg = smoothed_;
    } else {
      cmd.raw_deg = 0.0;
      smoothed_ = smooth(smoothed_, 0.0, params_.alpha);
    }
  }
  smoothed_ = std::clamp(smoothed_, -params_.theta_max, params_.theta_max);
  cmd.smoothed_deg = smoothed_;
  return cmd;
}

}  // namespace lanesim
