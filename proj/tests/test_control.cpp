#include <doctest.h>

#include <cmath>
#include <vector>

#include "lanesim/control.hpp"
#include "lanesim/error.hpp"
#include "support.hpp"

using namespace lanesim;

namespace {

LaneEstimate lane(double offset_px, double curvature, bool valid = true) {
  LaneEstimate e;
  e.valid = valid;
  e.far_valid = valid;
  e.center_x = 320.0 + offset_px;
  e.offset_px = offset_px;
  e.curvature = curvature;
  return e;
}

LaneEstimate random_lane(std::mt19937_64& g) {
  return lane(testing::uniform(g, -400.0, 400.0), testing::uniform(g, -2.0, 2.0),
              lanesim::rng::uniform01(g) < 0.8);
}

double mean_abs_diff(const std::vector<double>& v) {
  double s = 0.0;
  for (std::size_t i = 1; i < v.size(); ++i) s += std::abs(v[i] - v[i - 1]);
  return s / static_cast<double>(v.size() - 1);
}

}  // namespace

TEST_CASE("steering law evaluates the bounded linear relation") {
  SteeringParams p;
  p.k_offset = 25.0;
  p.k_curv = 20.0;
  p.theta_max = 30.0;
  CHECK(steering_law(lane(32.0, 0.0), 640, p) == doctest::Approx(2.5));
  CHECK(steering_law(lane(0.0, 0.1), 640, p) == doctest::Approx(2.0));
  CHECK(steering_law(lane(320.0, 1.0), 640, p) == 30.0);
  CHECK(steering_law(lane(-320.0, -1.0), 640, p) == -30.0);
  CHECK_THROWS_AS((void)steering_law(lane(0.0, 0.0, false), 640, p), InvalidInput);
}

TEST_CASE("smoothing is an exponential moving average") {
  CHECK(smooth(0.0, 10.0, 0.4) == doctest::Approx(4.0));
  CHECK(smooth(-3.0, 7.5, 1.0) == 7.5);
  CHECK(smooth(6.0, 6.0, 0.3) == doctest::Approx(6.0));
}

TEST_CASE("parameter validation") {
  SteeringParams p;
  p.alpha = 0.0;
  CHECK_THROWS_AS(SteeringController{p}, ConfigError);
  p.alpha = 1.5;
  CHECK_THROWS_AS(SteeringController{p}, ConfigError);
  p = SteeringParams{};
  p.theta_max = 0.0;
  CHECK_THROWS_AS(SteeringController{p}, ConfigError);
  p = SteeringParams{};
  p.hold_frames = -1;
  CHECK_THROWS_AS(SteeringController{p}, ConfigError);
}

TEST_CASE("controller first frame and hold semantics") {
  SteeringController c(SteeringParams{});
  const auto first = c.step(lane(0.0, 0.0), 640);
  CHECK(first.raw_deg == 0.0);
  CHECK(first.smoothed_deg == 0.0);
  CHECK_FALSE(first.lane_lost);

  SteeringParams p;
  p.k_offset = 50.0;
  p.k_curv = 0.0;
  p.alpha = 1.0;
  p.hold_frames = 5;
  SteeringController hold(p);
  hold.step(lane(32.0, 0.0), 640);
  REQUIRE(hold.smoothed() == doctest::Approx(5.0));
  for (int i = 0; i < 5; ++i) {
    const auto cmd = hold.step(lane(0.0, 0.0, false), 640);
    CHECK(cmd.lane_lost);
    CHECK(cmd.smoothed_deg == doctest::Approx(5.0));
  }
  const auto decayed = hold.step(lane(0.0, 0.0, false), 640);
  CHECK(decayed.lane_lost);
  CHECK(decayed.smoothed_deg == 0.0);

  p.alpha = 0.5;
  SteeringController slow(p);
  slow.step(lane(32.0, 0.0), 640);
  const double s0 = slow.smoothed();
  for (int i = 0; i < 5; ++i) slow.step(lane(0.0, 0.0, false), 640);
  CHECK(slow.step(lane(0.0, 0.0, false), 640).smoothed_deg == doctest::Approx(0.5 * s0));
  CHECK(slow.step(lane(0.0, 0.0, false), 640).smoothed_deg == doctest::Approx(0.25 * s0));

  slow.reset();
  CHECK(slow.smoothed() == 0.0);
}

TEST_CASE("property: controller replay equals an offline law-plus-EMA oracle") {
  std::mt19937_64 g(21);
  for (int run = 0; run < testing::kPropertyCases; ++run) {
    SteeringParams p;
    p.k_offset = testing::uniform(g, 0.0, 80.0);
    p.k_curv = testing::uniform(g, 0.0, 60.0);
    p.theta_max = testing::uniform(g, 5.0, 45.0);
    p.alpha = testing::uniform(g, 0.05, 1.0);
    p.hold_frames = testing::uniform_int(g, 0, 6);
    SteeringController c(p);
    double s = 0.0;
    int lost = 0;
    const int n = testing::uniform_int(g, 1, 40);
    for (int i = 0; i < n; ++i) {
      const auto est = random_lane(g);
      const auto cmd = c.step(est, 640);
      if (est.valid) {
        lost = 0;
        double raw = p.k_offset * (est.offset_px / 320.0) + p.k_curv * est.curvature;
        raw = std::min(std::max(raw, -p.theta_max), p.theta_max);
        s = p.alpha * raw + (1.0 - p.alpha) * s;
        REQUIRE(cmd.raw_deg == raw);
      } else if (++lost > p.hold_frames) {
        s = (1.0 - p.alpha) * s + p.alpha * 0.0;
      }
      REQUIRE(cmd.lane_lost == !est.valid);
      REQUIRE(cmd.smoothed_deg == s);
    }
  }
}

TEST_CASE("property: commands stay within theta_max") {
  std::mt19937_64 g(22);
  for (int run = 0; run < testing::kPropertyCases; ++run) {
    SteeringParams p;
    p.k_offset = testing::uniform(g, 0.0, 500.0);
    p.k_curv = testing::uniform(g, 0.0, 500.0);
    p.theta_max = testing::uniform(g, 1.0, 45.0);
    p.alpha = testing::uniform(g, 0.01, 1.0);
    SteeringController c(p);
    for (int i = 0; i < 30; ++i) {
      const auto cmd = c.step(random_lane(g), 640);
      REQUIRE(std::abs(cmd.raw_deg) <= p.theta_max);
      REQUIRE(std::abs(cmd.smoothed_deg) <= p.theta_max);
    }
  }
}

TEST_CASE("property: raw steering is monotone in offset") {
  std::mt19937_64 g(23);
  SteeringParams p;
  for (int i = 0; i < testing::kPropertyCases; ++i) {
    const double curv = testing::uniform(g, -1.0, 1.0);
    const double a = testing::uniform(g, -400.0, 400.0);
    const double b = a + testing::uniform(g, 1e-3, 100.0);
    const double ra = steering_law(lane(a, curv), 640, p);
    const double rb = steering_law(lane(b, curv), 640, p);
    REQUIRE(ra <= rb);
    if (std::abs(ra) < p.theta_max && std::abs(rb) < p.theta_max) REQUIRE(ra < rb);
  }
}

TEST_CASE("property: mirrored inputs give negated steering") {
  std::mt19937_64 g(24);
  SteeringParams p;
  for (int i = 0; i < testing::kPropertyCases; ++i) {
    const double off = testing::uniform(g, -400.0, 400.0);
    const double curv = testing::uniform(g, -2.0, 2.0);
    REQUIRE(steering_law(lane(-off, -curv), 640, p) == -steering_law(lane(off, curv), 640, p));
  }
}

TEST_CASE("property: smoothing never increases jitter") {
  std::mt19937_64 g(25);
  for (int run = 0; run < testing::kPropertyCases; ++run) {
    const double alpha = testing::uniform(g, 0.01, 0.99);
    const int n = testing::uniform_int(g, 2, 60);
    std::vector<double> raw(static_cast<std::size_t>(n));
    for (auto& r : raw) r = testing::uniform(g, -30.0, 30.0);
    std::vector<double> sm;
    double s = raw[0];
    sm.push_back(s);
    for (int i = 1; i < n; ++i) {
      s = smooth(s, raw[static_cast<std::size_t>(i)], alpha);
      sm.push_back(s);
    }
    REQUIRE(mean_abs_diff(sm) <= mean_abs_diff(raw) + 1e-12);
  }
}
