#include "lanesim/sim.hpp"

#include <chrono>
#include <cmath>
#include <numbers>

#include "lanesim/config.hpp"
#include "lanesim/error.hpp"

namespace lanesim {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

constexpr double deg2rad(double d) { return d * std::numbers::pi / 180.0; }

std::string lux_label(const IlluminationPreset& p) { return format9(p.lux); }

}  // namespace

void SimConfig::validate() const {
  if (!(dt > 0.0)) throw ConfigError("dt must be positive");
  if (!(duration > 0.0)) throw ConfigError("duration must be positive");
  if (!(virtual_frame_ms > 0.0)) throw ConfigError("virtual_frame_ms must be positive");
  camera.validate();
  lane.validate(camera.width, camera.height);
  steering.validate();
  preset.validate();
  if (!(vehicle.speed > 0.0)) throw ConfigError("vehicle speed must be positive");
  if (!(vehicle.wheelbase > 0.0)) throw ConfigError("vehicle wheelbase must be positive");
  if (!(vehicle.width > 0.0 && vehicle.width < track.lane_width)) {
    throw ConfigError("vehicle width must be positive and narrower than the lane");
  }
  (void)generate_track(track);
}

LanePipeline::LanePipeline(const CameraModel& camera, const HsvThreshold& thresholds,
                           const LaneDetectorParams& lane, const SteeringParams& steering)
    : width_(camera.width),
      thresholds_(thresholds),
      lane_(lane),
      warper_(camera.homography(), camera.width, camera.height, camera.width, camera.height),
      controller_(steering) {
  thresholds_.validate();
  lane_.validate(camera.width, camera.height);
}

PipelineOutput LanePipeline::process(const Frame& rgb) {
  const Frame hsv = rgb_to_hsv(rgb);
  const BinaryMask mask = threshold_mask(hsv, thresholds_);
  birdseye_ = warper_(mask);
  PipelineOutput out;
  out.estimate = estimate_lane(birdseye_, lane_);
  out.command = controller_.step(out.estimate, width_);
  return out;
}

double command_to_wheel_rad(double command_deg) { return -deg2rad(command_deg); }

VehicleState initial_state(const SimConfig& cfg, const TrackSpec& track) {
  const Pose p = pose_at(track, 0.0);
  VehicleState s;
  s.x = p.x + cfg.vehicle.initial_lateral * std::sin(p.heading);
  s.y = p.y - cfg.vehicle.initial_lateral * std::cos(p.heading);
  s.heading = p.heading + deg2rad(cfg.vehicle.initial_heading_deg);
  s.speed = cfg.vehicle.speed;
  s.wheelbase = cfg.vehicle.wheelbase;
  s.steering = 0.0;
  return s;
}

RunLog run_joint_pipeline(const SimConfig& cfg, const signeval::Classifier* classifier,
                          const SignStream& sign_stream, double class_rate_hz) {
  cfg.validate();
  if (class_rate_hz < 0.0) throw ConfigError("classification rate must be non-negative");
  if (class_rate_hz > 0.0 && classifier == nullptr) {
    throw ConfigError("classification enabled without a classifier");
  }
  const TrackSpec track = generate_track(cfg.track);
  const CameraRenderer renderer(cfg.camera, track, cfg.preset, cfg.seed);
  LanePipeline pipeline(cfg.camera, cfg.preset.thresholds, cfg.lane, cfg.steering);

  RunMeta meta;
  meta.seed = cfg.seed;
  meta.config_hash = config_hash(cfg);
  meta.image_width = cfg.camera.width;
  meta.theta_max = cfg.steering.theta_max;
  RunLog log(meta);

  const auto frames = static_cast<std::uint64_t>(std::llround(cfg.duration / cfg.dt));
  const std::string lux = lux_label(cfg.preset);
  const bool wall = cfg.timing == TimingMode::wall;
  const double class_period = class_rate_hz > 0.0 ? 1.0 / class_rate_hz : 0.0;
  std::optional<std::uint64_t> last_class_frame;
  VehicleState state = initial_state(cfg, track);

  for (std::uint64_t k = 0; k < frames; ++k) {
    const Frame camera = renderer.render(state, k);
    const TrackProjection gt = project(track, state.x, state.y);

    const auto start = Clock::now();
    const PipelineOutput out = pipeline.process(camera);

    std::optional<ClassEvent> event;
    if (class_rate_hz > 0.0 &&
        (!last_class_frame ||
         static_cast<double>(k - *last_class_frame) * cfg.dt >= class_period - 1e-9)) {
      const auto class_start = Clock::now();
      const Frame sign = sign_stream ? sign_stream(k, camera) : camera;
      const signeval::Prediction pred = signeval::classify(*classifier, sign);
      const double latency = wall ? elapsed_ms(class_start) : 0.0;
      event = ClassEvent{classifier->labels().name(pred.label), latency};
      last_class_frame = k;
    }
    const double proc = wall ? elapsed_ms(start) : cfg.virtual_frame_ms;

    RunSample s;
    s.t = static_cast<double>(k) * cfg.dt;
    s.frame_idx = k;
    s.lux_label = lux;
    s.offset_px = out.estimate.valid ? out.estimate.offset_px : 0.0;
    s.gt_deviation_m = gt.lateral;
    s.curvature = out.estimate.valid ? out.estimate.curvature : 0.0;
    s.raw_deg = out.command.raw_deg;
    s.smoothed_deg = out.command.smoothed_deg;
    s.proc_ms = std::max(proc, 1e-6);
    s.lane_lost = out.command.lane_lost;
    s.class_event = std::move(event);
    log.append(std::move(s));

    state = vehicle_step(state, command_to_wheel_rad(out.command.smoothed_deg), cfg.dt);
    const TrackProjection after = project(track, state.x, state.y);
    if (std::abs(after.lateral) > 2.0 * cfg.track.lane_width) {
      log.meta().status = "off_track";
      break;
    }
  }
  return log;
}

RunLog run_closed_loop(const SimConfig& cfg) { return run_joint_pipeline(cfg, nullptr, {}, 0.0); }

PipelineBench bench_pipeline(const SimConfig& cfg, int warmup, int reps, int distinct_frames) {
  cfg.validate();
  if (reps < 1) throw InvalidInput("bench_pipeline: reps must be >= 1");
  if (distinct_frames < 1) throw InvalidInput("bench_pipeline: need at least one frame");
  const TrackSpec track = generate_track(cfg.track);
  const CameraRenderer renderer(cfg.camera, track, cfg.preset, cfg.seed);

  // Frames spread evenly along the centerline.
  std::vector<Frame> frames;
  frames.reserve(static_cast<std::size_t>(distinct_frames));
  const double step = track.total_length() / distinct_frames;
  for (int i = 0; i < distinct_frames; ++i) {
    const Pose p = pose_at(track, i * step);
    VehicleState s;
    s.x = p.x;
    s.y = p.y;
    s.heading = p.heading;
    frames.push_back(renderer.render(s, static_cast<std::uint64_t>(i)));
  }

  LanePipeline pipeline(cfg.camera, cfg.preset.thresholds, cfg.lane, cfg.steering);
  for (int i = 0; i < warmup; ++i) (void)pipeline.process(frames[static_cast<std::size_t>(i) % frames.size()]);

  std::vector<double> times;
  times.reserve(static_cast<std::size_t>(reps));
  const auto total_start = Clock::now();
  for (int i = 0; i < reps; ++i) {
    const auto start = Clock::now();
    (void)pipeline.process(frames[static_cast<std::size_t>(i) % frames.size()]);
    times.push_back(elapsed_ms(start));
  }
  const double total = elapsed_ms(total_start);

  PipelineBench b;
  b.reps = reps;
  double sum = 0.0;
  for (double t : times) sum += t;
  b.mean_ms = sum / reps;
  double ss = 0.0;
  for (double t : times) ss += (t - b.mean_ms) * (t - b.mean_ms);
  b.std_ms = std::sqrt(ss / reps);
  b.fps = reps / (total / 1000.0);
  return b;
}

}  // namespace lanesim
