#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lanesim/geometry.hpp"
#include "lanesim/imaging.hpp"
#include "lanesim/rng.hpp"
#include "lanesim/track.hpp"
#include "lanesim/vehicle.hpp"

namespace lanesim {

/// Calibration of the forward camera. The homography maps camera pixels to
/// bird's-eye pixels; the bird's-eye image has the camera's size and a uniform
/// metric scale, with column width/2 on the vehicle axis.
struct CameraModel {
  int width = 640;
  int height = 480;
  QuadCorrespondence quad;
  double px_per_m = 640.0;
  double near_m = 0.2;  // ground distance ahead of the reference point at the bottom row

  /// Trapezoid over the lower 60% of the frame, widening past the frame edges
  /// at the bottom, mapped onto the full bird's-eye rectangle.
  static CameraModel defaults(int width = 640, int height = 480);

  [[nodiscard]] Homography homography() const { return homography_from_quads(quad); }

  // Bird's-eye index coordinates <-> vehicle-local metres. Pixel u spans the
  // lateral interval [(u - w/2)/scale, (u + 1 - w/2)/scale).
  [[nodiscard]] double lateral_of_column(double u) const noexcept {
    return (u + 0.5 - 0.5 * width) / px_per_m;
  }
  [[nodiscard]] double forward_of_row(double v) const noexcept {
    return near_m + (height - (v + 0.5)) / px_per_m;
  }

  void validate() const;
};

struct IlluminationPreset {
  std::string name = "low";
  double lux = 282.82;  // label only
  double v_gain = 0.6;
  double noise_sigma = 0.03;  // per-channel std as a fraction of full scale
  double glare = 0.0;         // strength of the specular streak overlay, 0 disables
  HsvThreshold thresholds;

  void validate() const;

  static IlluminationPreset low();
  static IlluminationPreset high();
  static IlluminationPreset by_name(const std::string& name);
};

/// Synthesizes camera frames of a track seen from a vehicle pose: each camera
/// pixel is mapped through the calibration homography into the bird's-eye
/// ground strip, classified as painted line or background (lines are painted
/// from each lane boundary toward the right), then shaded by the
/// preset and perturbed with seeded Gaussian noise.
class CameraRenderer {
 public:
  CameraRenderer(CameraModel camera, TrackSpec track, IlluminationPreset preset,
                 std::uint64_t seed);

  /// Noise depends on (seed, frame_idx) only, so re-rendering is bit-identical.
  [[nodiscard]] Frame render(const VehicleState& state, std::uint64_t frame_idx) const;

  /// Ground-truth line mask in bird's-eye space for a pose (no illumination).
  [[nodiscard]] BinaryMask birdseye_truth(const VehicleState& state) const;

  /// Ground-truth line mask in camera space for a pose.
  [[nodiscard]] BinaryMask camera_truth(const VehicleState& state) const;

  [[nodiscard]] const CameraModel& camera() const noexcept { return camera_; }
  [[nodiscard]] const TrackSpec& track() const noexcept { return track_; }
  [[nodiscard]] const IlluminationPreset& preset() const noexcept { return preset_; }

 private:
  struct Ground {
    float forward;
    float right;
  };

  static double reach(std::span<const Ground> points);
  void classify(const VehicleState& state, std::span<const Ground> points, double reach,
                std::span<std::uint8_t> out) const;

  CameraModel camera_;
  TrackSpec track_;
  IlluminationPreset preset_;
  std::uint64_t seed_;
  std::vector<Ground> ground_;         // per camera pixel; NaN forward above the horizon
  std::vector<Ground> birdseye_;       // per bird's-eye pixel
  std::vector<std::uint8_t> glare_;    // per camera pixel
  double ground_reach_ = 0.0;
  double birdseye_reach_ = 0.0;
  rng::NoiseBank noise_;
};

[[nodiscard]] Frame render_camera_frame(const TrackSpec& track, const VehicleState& state,
                                        const IlluminationPreset& preset,
                                        const CameraModel& camera, std::uint64_t seed,
                                        std::uint64_t frame_idx = 0);

}  // namespace lanesim
