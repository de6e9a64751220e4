#pragma once

#include <cstdint>
#include <functional>
#include <optional>

#include "lanesim/camera.hpp"
#include "lanesim/control.hpp"
#include "lanesim/geometry.hpp"
#include "lanesim/lane.hpp"
#include "lanesim/signeval/classifier.hpp"
#include "lanesim/telemetry.hpp"
#include "lanesim/track.hpp"

namespace lanesim {

struct VehicleParams {
  double speed = 0.5;  // m/s
  double wheelbase = 0.15;
  double width = 0.12;
  double initial_lateral = 0.0;      // m, positive right of the centerline
  double initial_heading_deg = 0.0;  // relative to the track direction, positive left
};

enum class TimingMode {
  virtual_clock,  // proc_ms is a fixed nominal cost: logs are byte-reproducible
  wall,           // proc_ms is measured with a steady clock
};

struct SimConfig {
  double dt = 1.0 / 30.0;
  double duration = 300.0;
  CameraModel camera = CameraModel::defaults();
  LaneDetectorParams lane = LaneDetectorParams::defaults(640, 480);
  SteeringParams steering;
  TrackParams track;
  VehicleParams vehicle;
  IlluminationPreset preset = IlluminationPreset::low();
  std::uint64_t seed = 1;
  TimingMode timing = TimingMode::virtual_clock;
  double virtual_frame_ms = 10.0;

  void validate() const;
};

struct PipelineOutput {
  LaneEstimate estimate;
  SteeringCommand command;
};

/// rgb -> HSV -> threshold mask -> bird's-eye warp -> lane estimate -> steering.
class LanePipeline {
 public:
  LanePipeline(const CameraModel& camera, const HsvThreshold& thresholds,
               const LaneDetectorParams& lane, const SteeringParams& steering);

  PipelineOutput process(const Frame& rgb);
  void reset() { controller_.reset(); }

  [[nodiscard]] const BinaryMask& last_birdseye_mask() const noexcept { return birdseye_; }

 private:
  int width_;
  HsvThreshold thresholds_;
  LaneDetectorParams lane_;
  MaskWarper warper_;
  SteeringController controller_;
  BinaryMask birdseye_;
};

/// Steering angle convention bridge: positive commands steer right, the
/// vehicle model turns left for positive angles.
[[nodiscard]] double command_to_wheel_rad(double command_deg);

/// Supplies the image handed to the classifier on a given tick; when unset the
/// camera frame itself is classified.
using SignStream = std::function<Frame(std::uint64_t frame_idx, const Frame& camera)>;

[[nodiscard]] RunLog run_closed_loop(const SimConfig& cfg);

/// Closed loop plus a rate-limited classifier: invoked on the first tick at
/// least 1/class_rate_hz simulated seconds after the previous invocation.
/// class_rate_hz == 0 disables classification.
[[nodiscard]] RunLog run_joint_pipeline(const SimConfig& cfg,
                                        const signeval::Classifier* classifier,
                                        const SignStream& sign_stream, double class_rate_hz);

struct PipelineBench {
  int reps = 0;
  double mean_ms = 0.0;
  double std_ms = 0.0;
  double fps = 0.0;  // reps / total wall time
};

/// Times LanePipeline::process (rendering excluded) on frames rendered along
/// the configured track.
[[nodiscard]] PipelineBench bench_pipeline(const SimConfig& cfg, int warmup, int reps,
                                           int distinct_frames = 64);

/// Starting pose on the centerline at s = 0, shifted by the vehicle params.
[[nodiscard]] VehicleState initial_state(const SimConfig& cfg, const TrackSpec& track);

}  // namespace lanesim
