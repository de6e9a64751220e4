#include "lanesim/track.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "lanesim/error.hpp"

namespace lanesim {

namespace {

constexpr double kPi = std::numbers::pi;

double wrap_angle(double a) {
  a = std::fmod(a + kPi, 2.0 * kPi);
  if (a < 0.0) a += 2.0 * kPi;
  return a - kPi;
}

struct SegmentHit {
  double distance;
  double lateral;
  double s;  // local arc length
};

SegmentHit project_segment(const TrackSegment& seg, double px, double py, bool extend_start,
                           bool extend_end) {
  const auto& p0 = seg.start;
  const double c = std::cos(p0.heading);
  const double sn = std::sin(p0.heading);
  if (seg.curvature == 0.0) {
    const double dx = px - p0.x;
    const double dy = py - p0.y;
    double t = dx * c + dy * sn;
    if (!extend_start) t = std::max(t, 0.0);
    if (!extend_end) t = std::min(t, seg.length);
    const double fx = p0.x + t * c;
    const double fy = p0.y + t * sn;
    // Right of travel is (sin, -cos).
    const double lateral = (px - fx) * sn - (py - fy) * c;
    return {std::hypot(px - fx, py - fy), lateral, t};
  }
  const double r = 1.0 / std::abs(seg.curvature);
  const double side = seg.curvature > 0.0 ? 1.0 : -1.0;  // centre lies to the left for +1
  const double cx = p0.x - side * r * sn;
  const double cy = p0.y + side * r * c;
  const double start_angle = std::atan2(p0.y - cy, p0.x - cx);
  const double angle = std::atan2(py - cy, px - cx);
  const double sweep = seg.length / r;
  // Angular travel from the start point in the direction of motion.
  double travel = wrap_angle(side * (angle - start_angle));
  if (travel < -0.5 * (2.0 * kPi - sweep)) travel += 2.0 * kPi;
  const double rho = std::hypot(px - cx, py - cy);
  if (travel >= 0.0 && travel <= sweep) {
    return {std::abs(rho - r), side * (rho - r), travel * r};
  }
  const double s_end = travel < 0.0 ? 0.0 : seg.length;
  const Pose e = seg.pose_at(s_end);
  const double lateral = (px - e.x) * std::sin(e.heading) - (py - e.y) * std::cos(e.heading);
  return {std::hypot(px - e.x, py - e.y), lateral, s_end};
}

}  // namespace

Pose TrackSegment::pose_at(double s) const noexcept {
  const double h0 = start.heading;
  if (curvature == 0.0) {
    return {start.x + s * std::cos(h0), start.y + s * std::sin(h0), h0};
  }
  const double h = h0 + curvature * s;
  return {start.x + (std::sin(h) - std::sin(h0)) / curvature,
          start.y - (std::cos(h) - std::cos(h0)) / curvature, h};
}

double TrackSpec::total_length() const noexcept {
  return std::accumulate(segments.begin(), segments.end(), 0.0,
                         [](double acc, const TrackSegment& s) { return acc + s.length; });
}

void TrackSpec::validate() const {
  if (segments.empty()) throw ConfigError("track has no segments");
  if (!(lane_width > 0.0) || !(line_width > 0.0)) {
    throw ConfigError("lane and line widths must be positive");
  }
  constexpr double kTol = 1e-9;
  for (std::size_t i = 0; i < segments.size(); ++i) {
    if (!(segments[i].length > 0.0)) throw ConfigError("track segment with non-positive length");
    if (segments[i].curvature != 0.0 && 1.0 / std::abs(segments[i].curvature) <= lane_width) {
      throw ConfigError("arc radius must exceed the lane width");
    }
    if (i + 1 < segments.size()) {
      const Pose e = segments[i].end();
      const Pose& n = segments[i + 1].start;
      if (std::hypot(e.x - n.x, e.y - n.y) > kTol) {
        throw ConfigError("track segments are not C0-continuous at segment " + std::to_string(i));
      }
    }
  }
  if (closed) {
    const Pose e = segments.back().end();
    const Pose& s = segments.front().start;
    if (std::hypot(e.x - s.x, e.y - s.y) > kTol) {
      throw ConfigError("closed track does not return to its start");
    }
  }
}

TrackKind parse_track_kind(const std::string& name) {
  if (name == "straight") return TrackKind::straight;
  if (name == "oval") return TrackKind::oval;
  if (name == "s-curve" || name == "s_curve") return TrackKind::s_curve;
  throw ConfigError("unknown track kind '" + name + "'");
}

std::string to_string(TrackKind kind) {
  switch (kind) {
    case TrackKind::straight: return "straight";
    case TrackKind::oval: return "oval";
    case TrackKind::s_curve: return "s-curve";
  }
  return "?";
}

TrackSpec generate_track(const TrackParams& p) {
  if (!(p.lane_width > 0.0) || !(p.line_width > 0.0)) {
    throw ConfigError("lane and line widths must be positive");
  }
  if (!(p.straight_length > 0.0) && p.kind != TrackKind::oval) {
    throw ConfigError("straight length must be positive");
  }
  if (p.kind != TrackKind::straight && !(p.radius > p.lane_width)) {
    throw ConfigError("track radius must exceed the lane width");
  }
  TrackSpec t;
  t.lane_width = p.lane_width;
  t.line_width = p.line_width;

  auto chain = [&t](double length, double curvature) {
    const Pose start = t.segments.empty() ? Pose{} : t.segments.back().end();
    t.segments.push_back({start, length, curvature});
  };

  switch (p.kind) {
    case TrackKind::straight:
      chain(p.straight_length, 0.0);
      break;
    case TrackKind::oval: {
      if (p.straight_length < 0.0) throw ConfigError("oval straights must be non-negative");
      const Pose start{-0.5 * p.straight_length, -p.radius, 0.0};
      const double k = 1.0 / p.radius;
      const double half_turn = kPi * p.radius;
      auto add = [&](double length, double curvature) {
        const Pose s = t.segments.empty() ? start : t.segments.back().end();
        t.segments.push_back({s, length, curvature});
      };
      if (p.straight_length > 0.0) add(p.straight_length, 0.0);
      add(half_turn, k);
      if (p.straight_length > 0.0) add(p.straight_length, 0.0);
      add(half_turn, k);
      t.closed = true;
      break;
    }
    case TrackKind::s_curve: {
      if (!(p.sweep_deg > 0.0 && p.sweep_deg < 180.0)) {
        throw ConfigError("s-curve sweep must lie in (0, 180) degrees");
      }
      const double arc = p.radius * p.sweep_deg * kPi / 180.0;
      chain(p.straight_length, 0.0);
      chain(arc, 1.0 / p.radius);
      chain(arc, -1.0 / p.radius);
      chain(p.straight_length, 0.0);
      break;
    }
  }
  t.validate();
  return t;
}

TrackProjection project(const TrackSpec& track, std::span<const std::size_t> segments, double x,
                        double y) {
  TrackProjection best;
  best.distance = std::numeric_limits<double>::infinity();
  const std::size_t n = track.segments.size();
  double offset = 0.0;
  std::size_t next_offset_index = 0;
  for (const std::size_t i : segments) {
    while (next_offset_index < i) offset += track.segments[next_offset_index++].length;
    const auto& seg = track.segments[i];
    const bool extend_start = !track.closed && i == 0 && seg.curvature == 0.0;
    const bool extend_end = !track.closed && i + 1 == n && seg.curvature == 0.0;
    const SegmentHit hit = project_segment(seg, x, y, extend_start, extend_end);
    if (hit.distance < best.distance) {
      best.distance = hit.distance;
      best.lateral = hit.lateral;
      best.s = offset + hit.s;
      best.heading = seg.pose_at(hit.s).heading;
    }
  }
  return best;
}

TrackProjection project(const TrackSpec& track, double x, double y) {
  std::vector<std::size_t> all(track.segments.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return project(track, all, x, y);
}

Pose pose_at(const TrackSpec& track, double s) {
  if (track.segments.empty()) throw InvalidInput("pose_at: empty track");
  const double total = track.total_length();
  if (track.closed) {
    s = std::fmod(s, total);
    if (s < 0.0) s += total;
  }
  for (const auto& seg : track.segments) {
    if (s <= seg.length) return seg.pose_at(std::max(s, 0.0));
    s -= seg.length;
  }
  return track.segments.back().pose_at(track.segments.back().length + s);
}

}  // namespace lanesim
