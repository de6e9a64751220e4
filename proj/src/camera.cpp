#include "lanesim/camera.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "lanesim/error.hpp"

namespace lanesim {

namespace {

constexpr std::uint8_t kBackground = 0;
constexpr std::uint8_t kLine = 1;
constexpr std::size_t kNoiseBankSize = std::size_t{1} << 22;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Closed-form distance/lateral evaluation for one centerline segment.
struct SegmentGeom {
  bool arc = false;
  bool extend_start = false;
  bool extend_end = false;
  double ox = 0, oy = 0, dx = 0, dy = 0, length = 0;  // line
  double cx = 0, cy = 0, radius = 0, side = 0;        // arc
  double sx = 0, sy = 0, ex = 0, ey = 0;              // arc start/end radius vectors
  double sweep = 0;
  Pose start_pose, end_pose;

  static SegmentGeom from(const TrackSegment& seg, bool extend_start, bool extend_end) {
    SegmentGeom g;
    g.start_pose = seg.start;
    g.end_pose = seg.end();
    g.extend_start = extend_start;
    g.extend_end = extend_end;
    const double c = std::cos(seg.start.heading);
    const double s = std::sin(seg.start.heading);
    if (seg.curvature == 0.0) {
      g.ox = seg.start.x;
      g.oy = seg.start.y;
      g.dx = c;
      g.dy = s;
      g.length = seg.length;
      return g;
    }
    g.arc = true;
    g.radius = 1.0 / std::abs(seg.curvature);
    g.side = seg.curvature > 0.0 ? 1.0 : -1.0;
    g.cx = seg.start.x - g.side * g.radius * s;
    g.cy = seg.start.y + g.side * g.radius * c;
    g.sx = seg.start.x - g.cx;
    g.sy = seg.start.y - g.cy;
    g.ex = g.end_pose.x - g.cx;
    g.ey = g.end_pose.y - g.cy;
    g.sweep = seg.length / g.radius;
    return g;
  }

  // Returns squared-free distance and writes the signed right-hand lateral.
  double eval(double px, double py, double& lateral) const {
    if (!arc) {
      const double rx = px - ox;
      const double ry = py - oy;
      double t = rx * dx + ry * dy;
      if (!extend_start && t < 0.0) t = 0.0;
      if (!extend_end && t > length) t = length;
      const double fx = px - (ox + t * dx);
      const double fy = py - (oy + t * dy);
      lateral = fx * dy - fy * dx;
      return std::sqrt(fx * fx + fy * fy);
    }
    const double rx = px - cx;
    const double ry = py - cy;
    bool inside;
    if (sweep <= std::numbers::pi + 1e-12) {
      const double c1 = side * (sx * ry - sy * rx);
      const double c2 = side * (rx * ey - ry * ex);
      inside = c1 >= 0.0 && c2 >= 0.0;
    } else {
      double a = side * (std::atan2(ry, rx) - std::atan2(sy, sx));
      a = std::fmod(a, 2.0 * std::numbers::pi);
      if (a < 0.0) a += 2.0 * std::numbers::pi;
      inside = a <= sweep;
    }
    if (inside) {
      const double rho = std::sqrt(rx * rx + ry * ry);
      lateral = side * (rho - radius);
      return std::abs(rho - radius);
    }
    const double ds = (px - start_pose.x) * (px - start_pose.x) +
                      (py - start_pose.y) * (py - start_pose.y);
    const double de = (px - end_pose.x) * (px - end_pose.x) + (py - end_pose.y) * (py - end_pose.y);
    const Pose& e = ds <= de ? start_pose : end_pose;
    lateral = (px - e.x) * std::sin(e.heading) - (py - e.y) * std::cos(e.heading);
    return std::sqrt(std::min(ds, de));
  }
};

Rgb shade(Hsv color, const IlluminationPreset& preset, bool glare) {
  Hsv c = color;
  c.v = static_cast<float>(std::min(1.0, c.v * preset.v_gain));
  if (glare) {
    const auto g = static_cast<float>(preset.glare);
    c.s *= 1.0F - 0.4F * g;
    c.v += (1.0F - c.v) * 0.35F * g;
  }
  return hsv_pixel_to_rgb(c);
}

}  // namespace

CameraModel CameraModel::defaults(int width, int height) {
  CameraModel m;
  m.width = width;
  m.height = height;
  const double w = width;
  const double h = height;
  const double top = 0.4 * h;
  m.quad.src = {Point2{-0.5 * w, h}, Point2{1.5 * w, h}, Point2{w, top},
                Point2{0.0, top}};
  m.quad.dst = {Point2{0.0, h}, Point2{w, h}, Point2{w, 0.0}, Point2{0.0, 0.0}};
  m.px_per_m = w;  // 1 m across the bird's-eye view
  return m;
}

void CameraModel::validate() const {
  if (width <= 0 || height <= 0) throw ConfigError("camera frame size must be positive");
  if (!(px_per_m > 0.0)) throw ConfigError("camera scale must be positive");
  if (!(near_m >= 0.0)) throw ConfigError("camera near distance must be non-negative");
  (void)homography();
}

void IlluminationPreset::validate() const {
  if (!(v_gain > 0.0)) throw ConfigError("preset v_gain must be positive");
  if (!(noise_sigma >= 0.0)) throw ConfigError("preset noise_sigma must be non-negative");
  if (!(glare >= 0.0 && glare <= 1.0)) throw ConfigError("preset glare must lie in [0, 1]");
  thresholds.validate();
}

IlluminationPreset IlluminationPreset::low() {
  IlluminationPreset p;
  p.name = "low";
  p.lux = 282.82;
  p.v_gain = 0.6;
  p.noise_sigma = 0.03;
  p.glare = 0.0;
  p.thresholds = {30.0, 70.0, 0.5, 1.0, 0.3, 1.0};
  return p;
}

IlluminationPreset IlluminationPreset::high() {
  IlluminationPreset p;
  p.name = "high";
  p.lux = 487.90;
  p.v_gain = 1.0;
  p.noise_sigma = 0.02;
  p.glare = 1.0;
  p.thresholds = {30.0, 70.0, 0.4, 1.0, 0.5, 1.0};
  return p;
}

IlluminationPreset IlluminationPreset::by_name(const std::string& name) {
  if (name == "low") return low();
  if (name == "high") return high();
  throw ConfigError("unknown illumination preset '" + name + "'");
}

CameraRenderer::CameraRenderer(CameraModel camera, TrackSpec track, IlluminationPreset preset,
                               std::uint64_t seed)
    : camera_(std::move(camera)),
      track_(std::move(track)),
      preset_(std::move(preset)),
      seed_(seed),
      noise_(splitmix64(seed ^ 0x6E6F697365ULL),
             std::max(kNoiseBankSize, static_cast<std::size_t>(camera_.width) * camera_.height * 4)) {
  camera_.validate();
  track_.validate();
  preset_.validate();

  const Homography to_birdseye = camera_.homography();
  const auto& m = to_birdseye.matrix();
  const std::size_t n = static_cast<std::size_t>(camera_.width) * camera_.height;
  ground_.resize(n);
  glare_.assign(n, 0);
  constexpr float kNaN = std::numeric_limits<float>::quiet_NaN();
  // Ground is rendered a quarter bird's-eye height beyond the far edge.
  const double v_min = -0.25 * camera_.height;
  // Ground points share the denominator sign of the bottom-centre pixel.
  const double ground_sign =
      m[6] * 0.5 * camera_.width + m[7] * (camera_.height - 1) + m[8] > 0.0 ? 1.0 : -1.0;
  for (int y = 0; y < camera_.height; ++y) {
    for (int x = 0; x < camera_.width; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * camera_.width + x;
      const double den = m[6] * x + m[7] * y + m[8];
      Ground g{kNaN, kNaN};
      if (den * ground_sign > 0.0) {
        const double u = (m[0] * x + m[1] * y + m[2]) / den;
        const double v = (m[3] * x + m[4] * y + m[5]) / den;
        if (v >= v_min) {
          g = {static_cast<float>(camera_.forward_of_row(v)),
               static_cast<float>(camera_.lateral_of_column(u))};
        }
      }
      ground_[i] = g;
      const double streak = x - 0.6 * y - 0.55 * camera_.width;
      glare_[i] = preset_.glare > 0.0 && std::abs(streak) < 0.06 * camera_.width ? 1 : 0;
    }
  }
  birdseye_.resize(n);
  for (int v = 0; v < camera_.height; ++v) {
    for (int u = 0; u < camera_.width; ++u) {
      birdseye_[static_cast<std::size_t>(v) * camera_.width + u] = {
          static_cast<float>(camera_.forward_of_row(v)),
          static_cast<float>(camera_.lateral_of_column(u))};
    }
  }
  ground_reach_ = reach(ground_);
  birdseye_reach_ = reach(birdseye_);
}

double CameraRenderer::reach(std::span<const Ground> points) {
  double r = 0.0;
  for (const auto& p : points) {
    if (!std::isnan(p.forward)) r = std::max(r, std::hypot(double{p.forward}, double{p.right}));
  }
  return r;
}

void CameraRenderer::classify(const VehicleState& state, std::span<const Ground> points,
                              double reach, std::span<std::uint8_t> out) const {
  const double c = std::cos(state.heading);
  const double s = std::sin(state.heading);
  const double view = reach + track_.lane_width + track_.line_width + 0.05;
  const std::size_t nseg = track_.segments.size();
  std::vector<SegmentGeom> candidates;
  for (std::size_t i = 0; i < nseg; ++i) {
    const auto& seg = track_.segments[i];
    const bool straight = seg.curvature == 0.0;
    const auto g = SegmentGeom::from(seg, !track_.closed && i == 0 && straight,
                                     !track_.closed && i + 1 == nseg && straight);
    double lat = 0.0;
    if (g.eval(state.x, state.y, lat) <= view) candidates.push_back(g);
  }

  // Band index of a lateral position: 1 and 3 are painted lines.
  const double half = 0.5 * track_.lane_width;
  const double lw = track_.line_width;
  auto band = [&](double lateral) {
    if (lateral < -half) return 0;
    if (lateral < -half + lw) return 1;
    if (lateral < half) return 2;
    if (lateral < half + lw) return 3;
    return 4;
  };
  auto lateral_at = [&](std::size_t i, double& lateral) {
    const Ground p = points[i];
    if (std::isnan(p.forward) || candidates.empty()) return false;
    // Right of heading is (sin, -cos).
    const double wx = state.x + p.forward * c + p.right * s;
    const double wy = state.y + p.forward * s - p.right * c;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& g : candidates) {
      double lat = 0.0;
      const double d = g.eval(wx, wy, lat);
      if (d < best) {
        best = d;
        lateral = lat;
      }
    }
    return true;
  };
  auto classify_one = [&](std::size_t i) {
    double lateral = 0.0;
    const int b = lateral_at(i, lateral) ? band(lateral) : -1;
    out[i] = (b == 1 || b == 3) ? kLine : kBackground;
    return b;
  };

  // Lateral position is smooth and monotone over a few pixels of one row, so
  // a span whose two ends fall in the same band is uniform.
  constexpr std::size_t kSpan = 8;
  const auto w = static_cast<std::size_t>(camera_.width);
  const std::size_t rows = points.size() / w;
  for (std::size_t row = 0; row < rows; ++row) {
    const std::size_t base = row * w;
    std::size_t a = 0;
    int band_a = classify_one(base);
    while (a + 1 < w) {
      const std::size_t b = std::min(a + kSpan, w - 1);
      const int band_b = classify_one(base + b);
      if (band_a == band_b && band_a >= 0) {
        std::fill(out.begin() + static_cast<std::ptrdiff_t>(base + a + 1),
                  out.begin() + static_cast<std::ptrdiff_t>(base + b), out[base + a]);
      } else {
        for (std::size_t i = a + 1; i < b; ++i) classify_one(base + i);
      }
      a = b;
      band_a = band_b;
    }
  }
}

Frame CameraRenderer::render(const VehicleState& state, std::uint64_t frame_idx) const {
  std::vector<std::uint8_t> cls(ground_.size());
  classify(state, ground_, ground_reach_, cls);

  const Rgb palette[2][2] = {
      {shade(track_.background_color, preset_, false), shade(track_.background_color, preset_, true)},
      {shade(track_.track_color, preset_, false), shade(track_.track_color, preset_, true)}};

  Frame out(camera_.width, camera_.height, PixelFormat::rgb8);
  auto data = out.data();
  const auto noise = noise_.values();
  const std::size_t span = data.size();
  const std::size_t offset =
      splitmix64(seed_ ^ (frame_idx * 0xD1B54A32D192ED03ULL)) % (noise.size() - span + 1);
  const auto sigma = static_cast<float>(preset_.noise_sigma * 255.0);
  for (std::size_t i = 0; i < cls.size(); ++i) {
    const Rgb& base = palette[cls[i]][glare_[i]];
    const float ch[3] = {base.r, base.g, base.b};
    for (std::size_t k = 0; k < 3; ++k) {
      const std::size_t j = 3 * i + k;
      const float v = std::clamp(ch[k] + sigma * noise[offset + j], 0.0F, 255.0F);
      data[j] = static_cast<float>(static_cast<int>(v + 0.5F));
    }
  }
  return out;
}

BinaryMask CameraRenderer::birdseye_truth(const VehicleState& state) const {
  BinaryMask mask(camera_.width, camera_.height);
  classify(state, birdseye_, birdseye_reach_, mask.bits());
  return mask;
}

BinaryMask CameraRenderer::camera_truth(const VehicleState& state) const {
  BinaryMask mask(camera_.width, camera_.height);
  classify(state, ground_, ground_reach_, mask.bits());
  return mask;
}

Frame render_camera_frame(const TrackSpec& track, const VehicleState& state,
                          const IlluminationPreset& preset, const CameraModel& camera,
                          std::uint64_t seed, std::uint64_t frame_idx) {
  return CameraRenderer(camera, track, preset, seed).render(state, frame_idx);
}

}  // namespace lanesim
