#include "lanesim/telemetry.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "lanesim/error.hpp"

namespace lanesim {

namespace {

struct Moments {
  double mean = 0.0;
  double stddev = 0.0;
};

// Population moments.
Moments moments(std::span<const double> xs) {
  if (xs.empty()) return {};
  double sum = 0.0;
  for (double x : xs) sum += x;
  const double mean = sum / static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / static_cast<double>(xs.size()))};
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

double parse_double(std::string_view s, std::size_t line, const char* field) {
  std::string tmp(s);
  char* end = nullptr;
  const double v = std::strtod(tmp.c_str(), &end);
  if (tmp.empty() || end != tmp.c_str() + tmp.size()) {
    throw ParseError(line, std::string("bad number in column ") + field + ": '" + tmp + "'");
  }
  return v;
}

std::uint64_t parse_u64(std::string_view s, std::size_t line, const char* field) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw ParseError(line, std::string("bad integer in column ") + field + ": '" +
                               std::string(s) + "'");
  }
  return v;
}

void check_text_field(const std::string& s, const char* field) {
  if (s.find_first_of(",\n\r") != std::string::npos) {
    throw InvalidInput(std::string("run log ") + field + " may not contain commas or newlines");
  }
}

}  // namespace

std::string format9(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

double round9(double v) {
  if (!std::isfinite(v)) return v;
  return std::strtod(format9(v).c_str(), nullptr);
}

void RunLog::append(RunSample s) {
  check_text_field(s.lux_label, "lux_label");
  s.t = round9(s.t);
  s.offset_px = round9(s.offset_px);
  s.gt_deviation_m = round9(s.gt_deviation_m);
  s.curvature = round9(s.curvature);
  s.raw_deg = round9(s.raw_deg);
  s.smoothed_deg = round9(s.smoothed_deg);
  s.proc_ms = round9(s.proc_ms);
  if (!(s.proc_ms > 0.0)) throw InvalidInput("run samples need proc_ms > 0");
  if (!samples_.empty() && !(s.t > samples_.back().t)) {
    throw InvalidInput("run sample timestamps must be strictly increasing");
  }
  if (s.class_event) {
    check_text_field(s.class_event->label, "class_label");
    if (s.class_event->label.empty()) throw InvalidInput("class events need a label");
    s.class_event->latency_ms = round9(s.class_event->latency_ms);
  }
  samples_.push_back(std::move(s));
}

double rmse(std::span<const double> series) {
  if (series.empty()) throw InvalidInput("rmse of an empty series");
  double ss = 0.0;
  for (double x : series) ss += x * x;
  return std::sqrt(ss / static_cast<double>(series.size()));
}

double normalized_rmse(double rmse_px, double image_width_px) {
  if (!(image_width_px > 0.0)) throw InvalidInput("image width must be positive");
  return rmse_px / image_width_px * 100.0;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw InvalidInput("pearson: series lengths differ");
  if (x.size() < 2) throw InvalidInput("pearson: need at least two points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw UndefinedCorrelation("pearson: constant series");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

MetricsReport summarize(const RunLog& log, int image_width) {
  const auto samples = log.samples();
  if (samples.size() < 2) throw InvalidInput("summarize: need at least two samples");
  if (image_width <= 0) throw InvalidInput("summarize: image width must be positive");

  MetricsReport r;
  r.sample_count = samples.size();

  std::vector<double> offsets;
  std::vector<double> abs_offsets;
  std::vector<double> curv;
  std::vector<double> steer;
  std::vector<double> proc;
  std::vector<double> fps;
  std::vector<double> gt;
  std::vector<double> class_latency;
  const double theta_max = log.meta().theta_max > 0.0 ? log.meta().theta_max : INFINITY;
  double jitter = 0.0;

  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    proc.push_back(s.proc_ms);
    if (s.proc_ms > 0.0) fps.push_back(1000.0 / s.proc_ms);
    gt.push_back(s.gt_deviation_m);
    if (i > 0) jitter += std::abs(s.smoothed_deg - samples[i - 1].smoothed_deg);
    if (s.class_event) class_latency.push_back(s.class_event->latency_ms);
    if (s.lane_lost) continue;
    offsets.push_back(s.offset_px);
    abs_offsets.push_back(std::abs(s.offset_px));
    if (std::abs(s.raw_deg) < theta_max) {
      curv.push_back(s.curvature);
      steer.push_back(s.smoothed_deg);
    }
  }
  if (offsets.empty()) throw InvalidInput("summarize: no lane-valid samples");

  r.lane_valid_count = offsets.size();
  const auto abs_m = moments(abs_offsets);
  const auto off_m = moments(offsets);
  r.mean_abs_offset_px = abs_m.mean;
  r.std_abs_offset_px = abs_m.stddev;
  r.mean_offset_px = off_m.mean;
  r.std_offset_px = off_m.stddev;
  r.offset_rmse_px = rmse(offsets);
  r.normalized_rmse_pct = normalized_rmse(r.offset_rmse_px, image_width);

  r.correlation_samples = curv.size();
  if (curv.size() >= 2) {
    try {
      r.pearson_r = pearson(curv, steer);
    } catch (const UndefinedCorrelation&) {
      r.pearson_r.reset();
    }
  }

  const auto proc_m = moments(proc);
  const auto fps_m = moments(fps);
  r.mean_proc_ms = proc_m.mean;
  r.std_proc_ms = proc_m.stddev;
  r.mean_fps = fps_m.mean;
  r.std_fps = fps_m.stddev;
  r.throughput_fps = proc_m.mean > 0.0 ? 1000.0 / proc_m.mean : 0.0;
  r.jitter_deg = jitter / static_cast<double>(samples.size() - 1);
  r.gt_rmse_m = rmse(gt);
  r.class_events = class_latency.size();
  r.mean_class_latency_ms = moments(class_latency).mean;
  return r;
}

std::string export_csv(const RunLog& log) {
  const auto& m = log.meta();
  std::string out;
  out += "# ";
  out += kRunLogVersion;
  out += "\n# seed=" + std::to_string(m.seed);
  out += "\n# config_hash=" + m.config_hash;
  out += "\n# image_width=" + std::to_string(m.image_width);
  out += "\n# theta_max=" + format9(m.theta_max);
  out += "\n# status=" + m.status + "\n";
  out += kRunLogColumns;
  out += '\n';
  for (const auto& s : log.samples()) {
    out += format9(s.t);
    out += ',' + std::to_string(s.frame_idx);
    out += ',' + s.lux_label;
    out += ',' + format9(s.offset_px);
    out += ',' + format9(s.gt_deviation_m);
    out += ',' + format9(s.curvature);
    out += ',' + format9(s.raw_deg);
    out += ',' + format9(s.smoothed_deg);
    out += ',' + format9(s.proc_ms);
    out += s.lane_lost ? ",1" : ",0";
    if (s.class_event) {
      out += ',' + s.class_event->label + ',' + format9(s.class_event->latency_ms);
    } else {
      out += ",,";
    }
    out += '\n';
  }
  return out;
}

RunLog import_csv(std::string_view csv) {
  RunLog log;
  bool saw_version = false;
  bool saw_header = false;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < csv.size()) {
    auto end = csv.find('\n', pos);
    if (end == std::string_view::npos) end = csv.size();
    std::string_view line = csv.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;

    if (line.front() == '#') {
      if (saw_header) throw ParseError(line_no, "comment after the column header");
      std::string_view body = line.substr(1);
      while (!body.empty() && body.front() == ' ') body.remove_prefix(1);
      if (!saw_version) {
        if (body != kRunLogVersion) {
          throw ParseError(line_no, "unsupported run log version '" + std::string(body) + "'");
        }
        saw_version = true;
        continue;
      }
      const auto eq = body.find('=');
      if (eq == std::string_view::npos) continue;
      const auto key = body.substr(0, eq);
      const auto value = body.substr(eq + 1);
      auto& m = log.meta();
      if (key == "seed") {
        m.seed = parse_u64(value, line_no, "seed");
      } else if (key == "config_hash") {
        m.config_hash = std::string(value);
      } else if (key == "image_width") {
        m.image_width = static_cast<int>(parse_u64(value, line_no, "image_width"));
      } else if (key == "theta_max") {
        m.theta_max = parse_double(value, line_no, "theta_max");
      } else if (key == "status") {
        m.status = std::string(value);
      }
      continue;
    }

    if (!saw_header) {
      if (line != kRunLogColumns) throw ParseError(line_no, "unexpected column header");
      saw_header = true;
      continue;
    }

    const auto f = split(line, ',');
    if (f.size() != 12) {
      throw ParseError(line_no, "expected 12 columns, got " + std::to_string(f.size()));
    }
    RunSample s;
    s.t = parse_double(f[0], line_no, "t");
    s.frame_idx = parse_u64(f[1], line_no, "frame_idx");
    s.lux_label = std::string(f[2]);
    s.offset_px = parse_double(f[3], line_no, "offset_px");
    s.gt_deviation_m = parse_double(f[4], line_no, "gt_deviation_m");
    s.curvature = parse_double(f[5], line_no, "curvature");
    s.raw_deg = parse_double(f[6], line_no, "raw_deg");
    s.smoothed_deg = parse_double(f[7], line_no, "smoothed_deg");
    s.proc_ms = parse_double(f[8], line_no, "proc_ms");
    if (f[9] != "0" && f[9] != "1") throw ParseError(line_no, "lane_lost must be 0 or 1");
    s.lane_lost = f[9] == "1";
    if (f[10].empty() != f[11].empty()) {
      throw ParseError(line_no, "class_label and class_latency_ms must be both set or both empty");
    }
    if (!f[10].empty()) {
      s.class_event = ClassEvent{std::string(f[10]), parse_double(f[11], line_no, "class_latency_ms")};
    }
    if (!log.empty() && !(s.t > log.samples().back().t)) {
      throw ParseError(line_no, "timestamps must be strictly increasing");
    }
    try {
      log.append(std::move(s));
    } catch (const InvalidInput& e) {
      throw ParseError(line_no, e.what());
    }
  }
  if (!saw_header) throw ParseError(line_no, "missing column header");
  return log;
}

}  // namespace lanesim
