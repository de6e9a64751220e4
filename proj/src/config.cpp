#include "lanesim/config.hpp"

#include <cstdio>
#include <fstream>

#include "lanesim/error.hpp"

namespace lanesim {

namespace {

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

json rect_json(const RectRegion& r) {
  return {{"x0", r.x0}, {"y0", r.y0}, {"x1", r.x1}, {"y1", r.y1}};
}

RectRegion rect_from(const json& j) {
  RectRegion r;
  read(j, "x0", r.x0);
  read(j, "y0", r.y0);
  read(j, "x1", r.x1);
  read(j, "y1", r.y1);
  return r;
}

json quad_json(const std::array<Point2, 4>& q) {
  json a = json::array();
  for (const auto& p : q) a.push_back({p.x, p.y});
  return a;
}

std::array<Point2, 4> quad_from(const json& j, const char* which) {
  if (!j.is_array() || j.size() != 4) {
    throw ConfigError(std::string("warp quad '") + which + "' needs four [x, y] points");
  }
  std::array<Point2, 4> q{};
  for (std::size_t i = 0; i < 4; ++i) {
    if (!j[i].is_array() || j[i].size() != 2) {
      throw ConfigError(std::string("warp quad '") + which + "' points must be [x, y]");
    }
    q[i] = {j[i][0].get<double>(), j[i][1].get<double>()};
  }
  return q;
}

std::string timing_name(TimingMode m) { return m == TimingMode::wall ? "wall" : "virtual"; }

TimingMode timing_from(const std::string& s) {
  if (s == "wall") return TimingMode::wall;
  if (s == "virtual") return TimingMode::virtual_clock;
  throw ConfigError("timing must be 'wall' or 'virtual', got '" + s + "'");
}

void apply_sim(const json& j, SimConfig& cfg) {
  read(j, "seed", cfg.seed);
  read(j, "dt", cfg.dt);
  read(j, "duration", cfg.duration);
  read(j, "virtual_frame_ms", cfg.virtual_frame_ms);
  if (j.contains("timing")) cfg.timing = timing_from(j.at("timing").get<std::string>());

  int width = cfg.camera.width;
  int height = cfg.camera.height;
  if (j.contains("frame")) {
    read(j.at("frame"), "width", width);
    read(j.at("frame"), "height", height);
    if (width <= 0 || height <= 0) throw ConfigError("frame size must be positive");
    if (width != cfg.camera.width || height != cfg.camera.height) {
      const double scale_ratio = cfg.camera.px_per_m / cfg.camera.width;
      const double near = cfg.camera.near_m;
      cfg.camera = CameraModel::defaults(width, height);
      cfg.camera.px_per_m = scale_ratio * width;
      cfg.camera.near_m = near;
      cfg.lane = LaneDetectorParams::defaults(width, height);
    }
  }
  if (j.contains("camera")) {
    const auto& c = j.at("camera");
    read(c, "px_per_m", cfg.camera.px_per_m);
    read(c, "near_m", cfg.camera.near_m);
    if (c.contains("warp_quad")) {
      const auto& q = c.at("warp_quad");
      if (!q.contains("src") || !q.contains("dst")) {
        throw ConfigError("warp_quad needs 'src' and 'dst'");
      }
      cfg.camera.quad.src = quad_from(q.at("src"), "src");
      cfg.camera.quad.dst = quad_from(q.at("dst"), "dst");
    }
  }
  if (j.contains("lane")) {
    const auto& l = j.at("lane");
    if (l.contains("near_roi")) cfg.lane.near_roi = rect_from(l.at("near_roi"));
    if (l.contains("far_roi")) cfg.lane.far_roi = rect_from(l.at("far_roi"));
    read(l, "min_peak_count", cfg.lane.min_peak_count);
  }
  if (j.contains("steering")) {
    const auto& s = j.at("steering");
    read(s, "k_offset", cfg.steering.k_offset);
    read(s, "k_curv", cfg.steering.k_curv);
    read(s, "theta_max", cfg.steering.theta_max);
    read(s, "alpha", cfg.steering.alpha);
    read(s, "hold_frames", cfg.steering.hold_frames);
  }
  if (j.contains("track")) {
    const auto& t = j.at("track");
    if (t.contains("kind")) cfg.track.kind = parse_track_kind(t.at("kind").get<std::string>());
    read(t, "radius", cfg.track.radius);
    read(t, "straight_length", cfg.track.straight_length);
    read(t, "sweep_deg", cfg.track.sweep_deg);
    read(t, "lane_width", cfg.track.lane_width);
    read(t, "line_width", cfg.track.line_width);
  }
  if (j.contains("vehicle")) {
    const auto& v = j.at("vehicle");
    read(v, "speed", cfg.vehicle.speed);
    read(v, "wheelbase", cfg.vehicle.wheelbase);
    read(v, "width", cfg.vehicle.width);
    read(v, "initial_lateral", cfg.vehicle.initial_lateral);
    read(v, "initial_heading_deg", cfg.vehicle.initial_heading_deg);
  }
}

}  // namespace

json to_json(const HsvThreshold& t) {
  return {{"h_low", t.h_low}, {"h_high", t.h_high}, {"s_low", t.s_low},
          {"s_high", t.s_high}, {"v_low", t.v_low}, {"v_high", t.v_high}};
}

HsvThreshold threshold_from_json(const json& j) {
  HsvThreshold t;
  read(j, "h_low", t.h_low);
  read(j, "h_high", t.h_high);
  read(j, "s_low", t.s_low);
  read(j, "s_high", t.s_high);
  read(j, "v_low", t.v_low);
  read(j, "v_high", t.v_high);
  t.validate();
  return t;
}

json to_json(const IlluminationPreset& p) {
  return {{"name", p.name},   {"lux", p.lux},     {"v_gain", p.v_gain},
          {"noise_sigma", p.noise_sigma}, {"glare", p.glare}, {"thresholds", to_json(p.thresholds)}};
}

IlluminationPreset preset_from_json(const json& j, IlluminationPreset p) {
  read(j, "name", p.name);
  read(j, "lux", p.lux);
  read(j, "v_gain", p.v_gain);
  read(j, "noise_sigma", p.noise_sigma);
  read(j, "glare", p.glare);
  if (j.contains("thresholds")) p.thresholds = threshold_from_json(j.at("thresholds"));
  p.validate();
  return p;
}

json to_json(const SimConfig& cfg) {
  const auto& c = cfg.camera;
  return {
      {"seed", cfg.seed},
      {"dt", cfg.dt},
      {"duration", cfg.duration},
      {"timing", timing_name(cfg.timing)},
      {"virtual_frame_ms", cfg.virtual_frame_ms},
      {"frame", {{"width", c.width}, {"height", c.height}}},
      {"camera",
       {{"px_per_m", c.px_per_m},
        {"near_m", c.near_m},
        {"warp_quad", {{"src", quad_json(c.quad.src)}, {"dst", quad_json(c.quad.dst)}}}}},
      {"lane",
       {{"near_roi", rect_json(cfg.lane.near_roi)},
        {"far_roi", rect_json(cfg.lane.far_roi)},
        {"min_peak_count", cfg.lane.min_peak_count}}},
      {"steering",
       {{"k_offset", cfg.steering.k_offset},
        {"k_curv", cfg.steering.k_curv},
        {"theta_max", cfg.steering.theta_max},
        {"alpha", cfg.steering.alpha},
        {"hold_frames", cfg.steering.hold_frames}}},
      {"track",
       {{"kind", to_string(cfg.track.kind)},
        {"radius", cfg.track.radius},
        {"straight_length", cfg.track.straight_length},
        {"sweep_deg", cfg.track.sweep_deg},
        {"lane_width", cfg.track.lane_width},
        {"line_width", cfg.track.line_width}}},
      {"vehicle",
       {{"speed", cfg.vehicle.speed},
        {"wheelbase", cfg.vehicle.wheelbase},
        {"width", cfg.vehicle.width},
        {"initial_lateral", cfg.vehicle.initial_lateral},
        {"initial_heading_deg", cfg.vehicle.initial_heading_deg}}},
      {"preset", to_json(cfg.preset)},
  };
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string config_hash(const SimConfig& cfg) { return fnv1a_hex(to_json(cfg).dump()); }

void AppConfig::finalize() {
  const auto it = presets.find(preset_name);
  if (it == presets.end()) throw ConfigError("unknown preset '" + preset_name + "'");
  sim.preset = it->second;
  sim.validate();
}

AppConfig AppConfig::from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config root must be a JSON object");
  AppConfig a;
  apply_sim(j, a.sim);
  if (j.contains("presets")) {
    for (const auto& [name, body] : j.at("presets").items()) {
      const auto base = a.presets.count(name) ? a.presets.at(name) : IlluminationPreset{};
      auto p = preset_from_json(body, base);
      p.name = name;
      a.presets[name] = p;
    }
  }
  if (j.contains("preset")) {
    const auto& p = j.at("preset");
    if (p.is_string()) {
      a.preset_name = p.get<std::string>();
    } else {
      throw ConfigError("'preset' must name an entry of 'presets'");
    }
  }
  if (j.contains("dataset")) {
    read(j.at("dataset"), "root", a.dataset_root);
    read(j.at("dataset"), "manifest", a.manifest_path);
  }
  a.finalize();
  return a;
}

AppConfig AppConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  return from_json(j);
}

json AppConfig::to_json() const {
  json j = lanesim::to_json(sim);
  j["preset"] = preset_name;
  json table = json::object();
  for (const auto& [name, p] : presets) table[name] = lanesim::to_json(p);
  j["presets"] = table;
  j["dataset"] = {{"root", dataset_root}, {"manifest", manifest_path}};
  return j;
}

}  // namespace lanesim
