#pragma once

#include <string>
#include <vector>

#include "lanesim/imaging.hpp"

namespace lanesim {

struct Pose {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;  // rad, counter-clockwise from +x
};

/// Constant-curvature piece of the centerline: a line when curvature == 0,
/// otherwise an arc of radius 1/|curvature| turning left for positive values.
struct TrackSegment {
  Pose start;
  double length = 0.0;
  double curvature = 0.0;

  [[nodiscard]] Pose pose_at(double s) const noexcept;
  [[nodiscard]] Pose end() const noexcept { return pose_at(length); }
};

struct TrackSpec {
  std::vector<TrackSegment> segments;
  double lane_width = 0.3;  // m, distance between the two lane boundaries
  double line_width = 0.025;  // m, width of each painted boundary line
  Hsv track_color{50.0F, 0.85F, 0.9F};
  Hsv background_color{210.0F, 0.2F, 0.45F};
  bool closed = false;

  [[nodiscard]] double total_length() const noexcept;
  /// Throws ConfigError when segments are not C0-continuous or a closed track
  /// does not return to its start.
  void validate() const;
};

enum class TrackKind { straight, oval, s_curve };

[[nodiscard]] TrackKind parse_track_kind(const std::string& name);
[[nodiscard]] std::string to_string(TrackKind kind);

struct TrackParams {
  TrackKind kind = TrackKind::oval;
  double radius = 2.0;           // oval and s-curve
  double straight_length = 4.0;  // oval straights, s-curve lead-in/out, straight track length
  double sweep_deg = 90.0;       // s-curve arc sweep
  double lane_width = 0.3;
  double line_width = 0.025;
};

/// Oval: two straights joined by half circles, counter-clockwise, closed.
/// S-curve: lead line, left arc, right arc, trailing line, open.
[[nodiscard]] TrackSpec generate_track(const TrackParams& params);

struct TrackProjection {
  double distance = 0.0;  // unsigned distance to the centerline
  double lateral = 0.0;   // signed, positive to the right of the travel direction
  double s = 0.0;         // arc length from the track start
  double heading = 0.0;   // centerline heading at the projection
};

/// Nearest-point projection onto the centerline. Open tracks extend their
/// first and last line segments indefinitely.
[[nodiscard]] TrackProjection project(const TrackSpec& track, double x, double y);

/// Same, restricted to a subset of segment indices.
[[nodiscard]] TrackProjection project(const TrackSpec& track, std::span<const std::size_t> segments,
                                      double x, double y);

[[nodiscard]] Pose pose_at(const TrackSpec& track, double s);

}  // namespace lanesim
