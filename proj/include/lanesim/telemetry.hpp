#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lanesim {

struct ClassEvent {
  std::string label;
  double latency_ms = 0.0;

  friend bool operator==(const ClassEvent&, const ClassEvent&) = default;
};

struct RunSample {
  double t = 0.0;
  std::uint64_t frame_idx = 0;
  std::string lux_label;
  double offset_px = 0.0;
  double gt_deviation_m = 0.0;  // signed, positive when the vehicle is right of the centerline
  double curvature = 0.0;
  double raw_deg = 0.0;
  double smoothed_deg = 0.0;
  double proc_ms = 0.0;
  bool lane_lost = false;
  std::optional<ClassEvent> class_event;

  friend bool operator==(const RunSample&, const RunSample&) = default;
};

struct RunMeta {
  std::uint64_t seed = 0;
  std::string config_hash;
  int image_width = 0;
  double theta_max = 0.0;
  std::string status = "completed";  // or "off_track"

  friend bool operator==(const RunMeta&, const RunMeta&) = default;
};

/// Time series of one run. Numeric fields are rounded to 9 significant digits
/// on append so the CSV form round-trips exactly.
class RunLog {
 public:
  RunLog() = default;
  explicit RunLog(RunMeta meta) : meta_(std::move(meta)) {}

  void append(RunSample sample);

  [[nodiscard]] const RunMeta& meta() const noexcept { return meta_; }
  RunMeta& meta() noexcept { return meta_; }
  [[nodiscard]] std::span<const RunSample> samples() const noexcept { return samples_; }
  [[nodiscard]] std::size_t size() const noexcept { return samples_.size(); }
  [[nodiscard]] bool empty() const noexcept { return samples_.empty(); }

  friend bool operator==(const RunLog&, const RunLog&) = default;

 private:
  RunMeta meta_;
  std::vector<RunSample> samples_;
};

/// Rounds to the value %.9g prints.
[[nodiscard]] double round9(double v);

struct MetricsReport {
  std::size_t sample_count = 0;
  std::size_t lane_valid_count = 0;
  double mean_abs_offset_px = 0.0;
  double std_abs_offset_px = 0.0;
  double mean_offset_px = 0.0;
  double std_offset_px = 0.0;
  double offset_rmse_px = 0.0;
  double normalized_rmse_pct = 0.0;
  std::optional<double> pearson_r;  // curvature vs smoothed steering; empty when undefined
  std::size_t correlation_samples = 0;
  double mean_proc_ms = 0.0;
  double std_proc_ms = 0.0;
  double mean_fps = 0.0;  // mean of per-frame 1000/proc_ms
  double std_fps = 0.0;
  double throughput_fps = 0.0;  // frames / total processing time
  double jitter_deg = 0.0;      // mean |delta smoothed_deg|
  double gt_rmse_m = 0.0;
  std::size_t class_events = 0;
  double mean_class_latency_ms = 0.0;
};

[[nodiscard]] double rmse(std::span<const double> series);
[[nodiscard]] double normalized_rmse(double rmse_px, double image_width_px);

/// Sample Pearson correlation. Throws UndefinedCorrelation when either series
/// is constant and InvalidInput on length mismatch or fewer than two points.
[[nodiscard]] double pearson(std::span<const double> x, std::span<const double> y);

/// Aggregates a run. Offset statistics use lane-valid samples; the correlation
/// uses lane-valid samples with |raw_deg| < theta_max. Needs at least two
/// samples, one of them lane-valid.
[[nodiscard]] MetricsReport summarize(const RunLog& log, int image_width);

inline constexpr std::string_view kRunLogVersion = "lanesim-runlog v1";
inline constexpr std::string_view kRunLogColumns =
    "t,frame_idx,lux_label,offset_px,gt_deviation_m,curvature,raw_deg,smoothed_deg,proc_ms,"
    "lane_lost,class_label,class_latency_ms";

[[nodiscard]] std::string export_csv(const RunLog& log);

/// Throws ParseError naming the offending line.
[[nodiscard]] RunLog import_csv(std::string_view csv);

/// Formats with %.9g.
[[nodiscard]] std::string format9(double v);

}  // namespace lanesim
