#include <doctest.h>

#include <chrono>
#include <cmath>
#include <numbers>
#include <thread>

#include "lanesim/error.hpp"
#include "lanesim/signeval/baseline.hpp"
#include "lanesim/signeval/synthetic.hpp"
#include "lanesim/sim.hpp"
#include "lanesim/track.hpp"
#include "lanesim/vehicle.hpp"
#include "support.hpp"

using namespace lanesim;

namespace {

IlluminationPreset clean_preset() {
  auto p = IlluminationPreset::high();
  p.name = "clean";
  p.v_gain = 1.0;
  p.noise_sigma = 0.0;
  p.glare = 0.0;
  return p;
}

SimConfig straight_config(double duration) {
  SimConfig cfg;
  cfg.track.kind = TrackKind::straight;
  cfg.track.straight_length = 20.0;
  cfg.preset = clean_preset();
  cfg.duration = duration;
  return cfg;
}

PipelineOutput process_pose(const SimConfig& cfg, double lateral) {
  const auto track = generate_track(cfg.track);
  auto c = cfg;
  c.vehicle.initial_lateral = lateral;
  const auto state = initial_state(c, track);
  CameraRenderer renderer(cfg.camera, track, cfg.preset, cfg.seed);
  LanePipeline pipe(cfg.camera, cfg.preset.thresholds, cfg.lane, cfg.steering);
  return pipe.process(renderer.render(state, 0));
}

const signeval::BaselineClassifier& sign_classifier() {
  static const auto c = signeval::BaselineClassifier::train(
      signeval::LabelSet::traffic_signs(), signeval::synthetic_sign_set(5, 3));
  return c;
}

class SlowClassifier final : public signeval::Classifier {
 public:
  explicit SlowClassifier(const signeval::Classifier& inner) : inner_(inner) {}
  [[nodiscard]] const signeval::LabelSet& labels() const override { return inner_.labels(); }
  [[nodiscard]] signeval::Prediction predict(const Frame& rgb) const override {
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
    return inner_.predict(rgb);
  }

 private:
  const signeval::Classifier& inner_;
};

}  // namespace

TEST_CASE("track generation") {
  TrackParams p;
  p.kind = TrackKind::straight;
  p.straight_length = 10.0;
  const auto straight = generate_track(p);
  CHECK(straight.segments.size() == 1);
  CHECK_FALSE(straight.closed);
  CHECK(straight.total_length() == doctest::Approx(10.0));

  p = TrackParams{};
  const auto oval = generate_track(p);
  CHECK(oval.closed);
  CHECK(oval.total_length() == doctest::Approx(2.0 * 4.0 + 2.0 * std::numbers::pi * 2.0));
  CHECK_NOTHROW(oval.validate());
  for (std::size_t i = 0; i < oval.segments.size(); ++i) {
    const auto end = oval.segments[i].end();
    const auto& next = oval.segments[(i + 1) % oval.segments.size()].start;
    CHECK(std::hypot(end.x - next.x, end.y - next.y) < 1e-9);
  }

  p.kind = TrackKind::s_curve;
  p.radius = 0.2;
  CHECK_THROWS_AS((void)generate_track(p), ConfigError);
  CHECK(parse_track_kind("oval") == TrackKind::oval);
  CHECK_THROWS_AS((void)parse_track_kind("figure8"), ConfigError);
}

TEST_CASE("projection reports signed lateral deviation") {
  TrackParams p;
  p.kind = TrackKind::straight;
  p.straight_length = 10.0;
  const auto track = generate_track(p);
  const auto start = track.segments.front().start;
  const double hx = std::cos(start.heading);
  const double hy = std::sin(start.heading);
  // Right of the travel direction is the heading rotated clockwise.
  const auto right = project(track, start.x + 3.0 * hx + 0.1 * hy, start.y + 3.0 * hy - 0.1 * hx);
  CHECK(right.lateral == doctest::Approx(0.1));
  CHECK(right.s == doctest::Approx(3.0));
  const auto left = project(track, start.x + 3.0 * hx - 0.1 * hy, start.y + 3.0 * hy + 0.1 * hx);
  CHECK(left.lateral == doctest::Approx(-0.1));
}

TEST_CASE("vehicle kinematics") {
  VehicleState s;
  s.heading = 0.3;
  const auto straight = vehicle_step(s, 0.0, 0.1);
  CHECK(straight.heading == s.heading);
  CHECK(straight.x == doctest::Approx(0.05 * std::cos(0.3)));
  CHECK(straight.y == doctest::Approx(0.05 * std::sin(0.3)));

  VehicleState still;
  still.speed = 0.0;
  still.x = 1.0;
  still.heading = 0.5;
  const auto same = vehicle_step(still, 0.4, 0.1);
  CHECK(same.x == still.x);
  CHECK(same.y == still.y);
  CHECK(same.heading == still.heading);
}

TEST_CASE("property: constant steering traces the closed-form circle") {
  std::mt19937_64 g(41);
  for (int i = 0; i < testing::kPropertyCases; ++i) {
    const double delta = testing::uniform(g, 0.05, 0.6) * (lanesim::rng::uniform01(g) < 0.5 ? -1 : 1);
    VehicleState s;
    s.speed = testing::uniform(g, 0.1, 2.0);
    s.wheelbase = testing::uniform(g, 0.1, 0.5);
    s.steering = delta;
    const double radius = s.wheelbase / std::tan(std::abs(delta));
    const int n = testing::uniform_int(g, 100, 600);
    const double dt = 2.0 * std::numbers::pi * radius / s.speed / n;
    const double step_len = s.speed * dt;
    VehicleState cur = s;
    double far = 0.0;
    for (int k = 0; k < n; ++k) {
      cur = vehicle_step(cur, delta, dt);
      far = std::max(far, std::hypot(cur.x - s.x, cur.y - s.y));
    }
    REQUIRE(std::hypot(cur.x - s.x, cur.y - s.y) < 1e-6 * radius);
    REQUIRE(std::abs(cur.heading - s.heading - std::copysign(2.0 * std::numbers::pi, delta)) < 1e-9);
    REQUIRE(std::abs(far - 2.0 * radius) < 2.0 * step_len);
  }
}

TEST_CASE("renderer is deterministic and noise depends on the seed") {
  const auto cfg = SimConfig{};
  const auto track = generate_track(cfg.track);
  const auto state = initial_state(cfg, track);
  CameraRenderer a(cfg.camera, track, cfg.preset, 5);
  CameraRenderer b(cfg.camera, track, cfg.preset, 5);
  CameraRenderer c(cfg.camera, track, cfg.preset, 6);
  const auto fa = a.render(state, 3);
  CHECK(fa == a.render(state, 3));
  CHECK(fa == b.render(state, 3));
  CHECK_FALSE(fa == c.render(state, 3));
  CHECK_FALSE(fa == a.render(state, 4));
  CHECK(fa == render_camera_frame(track, state, cfg.preset, cfg.camera, 5, 3));
}

TEST_CASE("centered vehicle on a clean straight reads zero offset") {
  const auto out = process_pose(straight_config(1.0), 0.0);
  REQUIRE(out.estimate.valid);
  CHECK(out.estimate.offset_px == 0.0);
  CHECK(out.estimate.curvature == 0.0);
  CHECK(out.command.raw_deg == 0.0);
}

TEST_CASE("lateral displacement matches the metric projection") {
  const auto cfg = straight_config(1.0);
  for (const double lateral : {0.05, -0.05, 0.02, -0.08}) {
    const auto out = process_pose(cfg, lateral);
    REQUIRE(out.estimate.valid);
    const double expected = -lateral * cfg.camera.px_per_m;
    CHECK(std::abs(out.estimate.offset_px - expected) <= 2.0);
  }
}

TEST_CASE("clean straight run keeps zero offset and steering") {
  const auto log = run_closed_loop(straight_config(3.0));
  CHECK(log.meta().status == "completed");
  CHECK(log.size() == 90);
  for (const auto& s : log.samples()) {
    REQUIRE_FALSE(s.lane_lost);
    REQUIRE(s.offset_px == 0.0);
    REQUIRE(s.smoothed_deg == 0.0);
    REQUIRE(s.raw_deg == 0.0);
  }
}

TEST_CASE("property: same seed gives byte-identical logs") {
  SimConfig cfg;
  cfg.duration = 2.0;
  cfg.seed = 9;
  const auto a = run_closed_loop(cfg);
  const auto b = run_closed_loop(cfg);
  CHECK(a == b);
  CHECK(export_csv(a) == export_csv(b));
  cfg.seed = 10;
  CHECK_FALSE(run_closed_loop(cfg) == a);
}

TEST_CASE("leaving the corridor aborts the run") {
  auto cfg = straight_config(20.0);
  cfg.steering.k_offset = 0.0;
  cfg.steering.k_curv = 0.0;
  cfg.vehicle.initial_heading_deg = 20.0;
  const auto log = run_closed_loop(cfg);
  CHECK(log.meta().status == "off_track");
  CHECK(log.samples().back().t < 19.0);
}

TEST_CASE("joint pipeline scheduling") {
  SimConfig cfg;
  cfg.duration = 10.0;
  const auto& clf = sign_classifier();
  const auto closed = run_closed_loop(cfg);
  const auto disabled = run_joint_pipeline(cfg, &clf, {}, 0.0);
  CHECK(disabled == closed);

  const auto joint = run_joint_pipeline(cfg, &clf, {}, 2.0);
  std::size_t events = 0;
  for (const auto& s : joint.samples()) events += s.class_event ? 1 : 0;
  CHECK(events >= 19);
  CHECK(events <= 21);

  CHECK_THROWS_AS((void)run_joint_pipeline(cfg, &clf, {}, -1.0), ConfigError);
  CHECK_THROWS_AS((void)run_joint_pipeline(cfg, nullptr, {}, 2.0), ConfigError);
}

TEST_CASE("classification latency is logged with wall timing") {
  SimConfig cfg;
  cfg.duration = 2.0;
  cfg.timing = TimingMode::wall;
  SlowClassifier slow(sign_classifier());
  const auto log = run_joint_pipeline(cfg, &slow, {}, 2.0);
  std::size_t events = 0;
  for (const auto& s : log.samples()) {
    if (!s.class_event) continue;
    ++events;
    CHECK(s.class_event->latency_ms >= 50.0);
    CHECK(s.proc_ms >= s.class_event->latency_ms);
  }
  CHECK(events == 4);
}

TEST_CASE("logged metrics equal an independent recomputation") {
  SimConfig cfg;
  cfg.duration = 60.0;
  const auto log = run_closed_loop(cfg);
  REQUIRE(log.meta().status == "completed");
  const auto report = summarize(log, cfg.camera.width);
  const auto reread = summarize(import_csv(export_csv(log)), cfg.camera.width);
  CHECK(reread.offset_rmse_px == report.offset_rmse_px);
  CHECK(reread.normalized_rmse_pct == report.normalized_rmse_pct);
  CHECK(*reread.pearson_r == *report.pearson_r);

  double ss = 0.0;
  std::size_t n = 0;
  std::vector<double> x;
  std::vector<double> y;
  for (const auto& s : log.samples()) {
    if (s.lane_lost) continue;
    ss += s.offset_px * s.offset_px;
    ++n;
    if (std::abs(s.raw_deg) < cfg.steering.theta_max) {
      x.push_back(s.curvature);
      y.push_back(s.smoothed_deg);
    }
  }
  const double rmse_px = std::sqrt(ss / static_cast<double>(n));
  CHECK(report.offset_rmse_px == doctest::Approx(rmse_px).epsilon(1e-12));
  CHECK(report.normalized_rmse_pct == doctest::Approx(100.0 * rmse_px / 640.0).epsilon(1e-12));

  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(y.size());
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  CHECK(*report.pearson_r == doctest::Approx(sxy / std::sqrt(sxx * syy)).epsilon(1e-12));
}
