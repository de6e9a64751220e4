#include "lanesim/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "lanesim/calibrate.hpp"
#include "lanesim/config.hpp"
#include "lanesim/error.hpp"
#include "lanesim/pnm.hpp"
#include "lanesim/signeval/baseline.hpp"
#include "lanesim/signeval/metrics.hpp"
#include "lanesim/signeval/synthetic.hpp"
#include "lanesim/sim.hpp"

namespace lanesim::cli {
namespace fs = std::filesystem;

namespace {

// Errors that mean the invocation itself is wrong.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string header_lines(std::string_view kind, const std::string& hash, std::uint64_t seed) {
  std::ostringstream os;
  os << "# lanesim-" << kind << " v1\n# seed=" << seed << "\n# config_hash=" << hash << "\n";
  return os.str();
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  pnm::write_file(path, text);
}

AppConfig load_app_config(const std::string& path_flag) {
  std::string path = path_flag;
  if (path.empty()) {
    if (const char* env = std::getenv("LANESIM_CONFIG"); env != nullptr) path = env;
  }
  if (path.empty()) {
    AppConfig a;
    a.finalize();
    return a;
  }
  return AppConfig::load(path);
}

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "JSON config file (falls back to $LANESIM_CONFIG)");
  cmd->add_option("--seed", c.seed, "RNG seed");
}

std::string json_text(const nlohmann::json& j) { return j.dump(2) + "\n"; }

// simulate

struct SimulateArgs {
  Common common;
  std::optional<std::string> preset;
  std::optional<std::string> track;
  std::optional<double> duration;
  std::optional<std::string> timing;
  bool no_noise = false;
  std::string out = ".";
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
  AppConfig app = load_app_config(a.common.config);
  if (a.preset) app.preset_name = *a.preset;
  if (a.common.seed) app.sim.seed = *a.common.seed;
  if (a.track) app.sim.track.kind = parse_track_kind(*a.track);
  if (a.duration) app.sim.duration = *a.duration;
  if (a.timing) {
    if (*a.timing == "virtual") {
      app.sim.timing = TimingMode::virtual_clock;
    } else if (*a.timing == "wall") {
      app.sim.timing = TimingMode::wall;
    } else {
      throw UsageError("--timing must be 'virtual' or 'wall'");
    }
  }
  app.finalize();
  if (a.no_noise) app.sim.preset.noise_sigma = 0.0;
  app.sim.validate();

  const RunLog log = run_closed_loop(app.sim);
  const fs::path dir(a.out);
  fs::create_directories(dir);
  write_text(dir / "run.csv", export_csv(log));

  nlohmann::json report;
  report["seed"] = log.meta().seed;
  report["config_hash"] = log.meta().config_hash;
  report["status"] = log.meta().status;
  report["config"] = to_json(app.sim);
  report["metrics"] = metrics_to_json(summarize(log, app.sim.camera.width));
  write_text(dir / "report.json", json_text(report));

  out << "status=" << log.meta().status << " frames=" << log.size()
      << " log=" << (dir / "run.csv").string() << "\n";
  return log.meta().status == "completed" ? kExitOk : kExitFailure;
}

// calibrate

struct CalibrateArgs {
  Common common;
  std::string frames;
  std::string labels;
  std::string out = "thresholds.json";
};

std::map<std::string, fs::path> files_by_stem(const fs::path& dir, std::string_view ext) {
  if (!fs::is_directory(dir)) throw InvalidInput("not a directory: " + dir.string());
  std::map<std::string, fs::path> m;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ext) m[e.path().stem().string()] = e.path();
  }
  return m;
}

int cmd_calibrate(const CalibrateArgs& a, std::ostream& out) {
  const AppConfig app = load_app_config(a.common.config);
  const auto frames = files_by_stem(a.frames, ".ppm");
  const auto labels = files_by_stem(a.labels, ".pgm");
  std::vector<std::string> unpaired;
  for (const auto& [stem, p] : frames) {
    if (!labels.count(stem)) unpaired.push_back(p.string());
  }
  for (const auto& [stem, p] : labels) {
    if (!frames.count(stem)) unpaired.push_back(p.string());
  }
  if (!unpaired.empty()) {
    std::string msg = "unpaired files:";
    for (const auto& u : unpaired) msg += " " + u;
    throw InvalidInput(msg);
  }
  std::vector<LabeledFrame> set;
  for (const auto& [stem, p] : frames) set.push_back({pnm::load(p), pnm::load_mask(labels.at(stem))});

  const CalibrationGrid grid;
  const CalibrationResult r = calibrate_thresholds(set, grid);
  nlohmann::json effective = {{"frames", set.size()},
                              {"grid",
                               {{"hue_bins", grid.hue_bins},
                                {"sat_bins", grid.sat_bins},
                                {"val_bins", grid.val_bins},
                                {"coarse_hue_step", grid.coarse_hue_step},
                                {"coarse_sv_step", grid.coarse_sv_step}}}};
  const std::uint64_t seed = a.common.seed.value_or(app.sim.seed);
  nlohmann::json j;
  j["seed"] = seed;
  j["config_hash"] = fnv1a_hex(effective.dump());
  j["config"] = effective;
  j["thresholds"] = to_json(r.thresholds);
  j["mean_iou"] = r.mean_iou;
  write_text(a.out, json_text(j));
  out << "mean_iou=" << r.mean_iou << " thresholds=" << a.out << "\n";
  return kExitOk;
}

// eval-classifier

struct EvalArgs {
  Common common;
  std::string manifest;
  std::string split = "test";
  std::string perturb;
  double reject = 0.5;
  std::string out = "eval_report.json";
};

int cmd_eval(const EvalArgs& a, std::ostream& out) {
  const AppConfig app = load_app_config(a.common.config);
  std::string manifest_path = a.manifest.empty() ? app.manifest_path : a.manifest;
  if (manifest_path.empty()) throw UsageError("--manifest is required (or dataset.manifest in the config)");
  const signeval::Split split = signeval::parse_split(a.split);
  const auto perturbs = signeval::parse_perturbations(a.perturb);
  const std::uint64_t seed = a.common.seed.value_or(app.sim.seed);

  const signeval::DatasetManifest m = signeval::load_manifest(manifest_path);
  const auto model = signeval::BaselineClassifier::train(m, a.reject);
  const signeval::EvalReport r = signeval::evaluate(model, m, split, perturbs, seed);

  nlohmann::json effective = {{"manifest", fs::path(manifest_path).generic_string()},
                              {"split", a.split},
                              {"perturb", signeval::to_string(perturbs)},
                              {"reject_threshold", a.reject},
                              {"seed", seed}};
  nlohmann::json j = nlohmann::json::parse(signeval::report_to_json(r, m.labels));
  j["seed"] = seed;
  j["config_hash"] = fnv1a_hex(effective.dump());
  j["config"] = effective;
  write_text(a.out, json_text(j));
  out << "accuracy=" << r.accuracy << " macro_f1=" << r.macro_f1 << " report=" << a.out << "\n";
  return kExitOk;
}

// report

struct ReportArgs {
  std::string log;
  std::string out = ".";
};

int cmd_report(const ReportArgs& a, std::ostream& out) {
  const RunLog log = import_csv(pnm::read_file(a.log));
  const RunReport r = build_report(log);
  const fs::path dir(a.out);
  fs::create_directories(dir);
  write_text(dir / "scatter.csv", r.scatter_csv);
  write_text(dir / "offset_trace.csv", r.trace_csv);
  write_text(dir / "summary.json", r.summary_json);
  out << "report=" << dir.string() << "\n";
  return kExitOk;
}

// manifest / gen-signs / gen-frames

struct ManifestArgs {
  Common common;
  std::string root;
  std::vector<double> fractions{0.70, 0.15, 0.15};
  std::string out = "manifest.json";
};

int cmd_manifest(const ManifestArgs& a, std::ostream& out) {
  const AppConfig app = load_app_config(a.common.config);
  if (a.fractions.size() != 3) throw UsageError("--fractions takes train,val,test");
  const std::string root = a.root.empty() ? app.dataset_root : a.root;
  if (root.empty()) throw UsageError("--root is required (or dataset.root in the config)");
  const auto m = signeval::build_manifest(root, {a.fractions[0], a.fractions[1], a.fractions[2]},
                                          a.common.seed.value_or(app.sim.seed));
  write_text(a.out, signeval::manifest_to_json(m));
  out << "entries=" << m.entries.size() << " manifest=" << a.out << "\n";
  return kExitOk;
}

struct GenSignsArgs {
  Common common;
  std::string out;
  int per_class = 200;
  double sigma = 0.02;
};

int cmd_gen_signs(const GenSignsArgs& a, std::ostream& out) {
  const AppConfig app = load_app_config(a.common.config);
  signeval::SyntheticSignParams p;
  p.noise_sigma = a.sigma;
  signeval::write_synthetic_dataset(a.out, a.per_class, a.common.seed.value_or(app.sim.seed), p);
  out << "images=" << a.per_class * 7 << " root=" << a.out << "\n";
  return kExitOk;
}

struct GenFramesArgs {
  Common common;
  std::optional<std::string> preset;
  std::optional<std::string> track;
  std::string out;
  int count = 8;
};

int cmd_gen_frames(const GenFramesArgs& a, std::ostream& out) {
  AppConfig app = load_app_config(a.common.config);
  if (a.preset) app.preset_name = *a.preset;
  if (a.common.seed) app.sim.seed = *a.common.seed;
  if (a.track) app.sim.track.kind = parse_track_kind(*a.track);
  app.finalize();
  if (a.count < 1) throw UsageError("--count must be >= 1");
  const TrackSpec track = generate_track(app.sim.track);
  const CameraRenderer renderer(app.sim.camera, track, app.sim.preset, app.sim.seed);
  const fs::path dir(a.out);
  fs::create_directories(dir / "frames");
  fs::create_directories(dir / "labels");
  const double step = track.total_length() / a.count;
  for (int i = 0; i < a.count; ++i) {
    const Pose p = pose_at(track, i * step);
    VehicleState s;
    s.x = p.x;
    s.y = p.y;
    s.heading = p.heading;
    char name[32];
    std::snprintf(name, sizeof name, "frame_%04d", i);
    pnm::save(dir / "frames" / (std::string(name) + ".ppm"), renderer.render(s, static_cast<std::uint64_t>(i)));
    pnm::save(dir / "labels" / (std::string(name) + ".pgm"), renderer.camera_truth(s));
  }
  out << "frames=" << a.count << " root=" << dir.string() << "\n";
  return kExitOk;
}

}  // namespace

nlohmann::json metrics_to_json(const MetricsReport& m) {
  nlohmann::json j;
  j["sample_count"] = m.sample_count;
  j["lane_valid_count"] = m.lane_valid_count;
  j["mean_abs_offset_px"] = m.mean_abs_offset_px;
  j["std_abs_offset_px"] = m.std_abs_offset_px;
  j["mean_offset_px"] = m.mean_offset_px;
  j["std_offset_px"] = m.std_offset_px;
  j["offset_rmse_px"] = m.offset_rmse_px;
  j["normalized_rmse_pct"] = m.normalized_rmse_pct;
  j["pearson_r"] = m.pearson_r ? nlohmann::json(*m.pearson_r) : nlohmann::json(nullptr);
  j["correlation_samples"] = m.correlation_samples;
  j["mean_proc_ms"] = m.mean_proc_ms;
  j["std_proc_ms"] = m.std_proc_ms;
  j["mean_fps"] = m.mean_fps;
  j["std_fps"] = m.std_fps;
  j["throughput_fps"] = m.throughput_fps;
  j["jitter_deg"] = m.jitter_deg;
  j["gt_rmse_m"] = m.gt_rmse_m;
  j["class_events"] = m.class_events;
  j["mean_class_latency_ms"] = m.mean_class_latency_ms;
  return j;
}

RunReport build_report(const RunLog& log) {
  if (log.empty()) throw InvalidInput("report: log has no samples");
  const RunMeta& meta = log.meta();
  RunReport r;
  std::string scatter = header_lines("scatter", meta.config_hash, meta.seed) + "curvature,smoothed_deg\n";
  std::string trace = header_lines("offset-trace", meta.config_hash, meta.seed) + "t,offset_px\n";
  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto& s : log.samples()) {
    trace += format9(s.t) + "," + format9(s.offset_px) + "\n";
    if (s.lane_lost || std::abs(s.raw_deg) >= meta.theta_max) continue;
    scatter += format9(s.curvature) + "," + format9(s.smoothed_deg) + "\n";
    xs.push_back(s.curvature);
    ys.push_back(s.smoothed_deg);
  }
  r.scatter_csv = std::move(scatter);
  r.trace_csv = std::move(trace);

  nlohmann::json fit;
  fit["n"] = xs.size();
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
  }
  const double n = static_cast<double>(xs.size());
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  if (!xs.empty()) {
    const double mx = sx / n, my = sy / n;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sxx += (xs[i] - mx) * (xs[i] - mx);
      sxy += (xs[i] - mx) * (ys[i] - my);
      syy += (ys[i] - my) * (ys[i] - my);
    }
  }
  if (sxx > 0.0 && syy > 0.0) {
    const double slope = sxy / sxx;
    fit["slope"] = slope;
    fit["intercept"] = (sy - slope * sx) / n;
    fit["r_squared"] = sxy * sxy / (sxx * syy);
  } else {
    fit["slope"] = nullptr;
    fit["intercept"] = nullptr;
    fit["r_squared"] = nullptr;
  }

  nlohmann::json j;
  j["seed"] = meta.seed;
  j["config_hash"] = meta.config_hash;
  j["status"] = meta.status;
  j["fit"] = fit;
  if (log.size() >= 2) j["metrics"] = metrics_to_json(summarize(log, meta.image_width));
  r.summary_json = json_text(j);
  return r;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Lane-keeping simulator and evaluation harness", "lanesim"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* c_sim = app.add_subcommand("simulate", "Closed-loop run; writes run.csv and report.json");
  add_common(c_sim, sim.common);
  c_sim->add_option("--preset", sim.preset, "Illumination preset (low, high or one from the config)");
  c_sim->add_option("--track", sim.track, "straight, oval or s-curve")
      ->check(CLI::IsMember({"straight", "oval", "s-curve"}));
  c_sim->add_option("--duration", sim.duration, "Simulated seconds");
  c_sim->add_option("--timing", sim.timing, "virtual (reproducible) or wall");
  c_sim->add_flag("--no-noise", sim.no_noise, "Disable pixel noise");
  c_sim->add_option("--out", sim.out, "Output directory");

  CalibrateArgs cal;
  auto* c_cal = app.add_subcommand("calibrate", "Search HSV thresholds against labeled masks");
  add_common(c_cal, cal.common);
  c_cal->add_option("--frames", cal.frames, "Directory of .ppm frames")->required();
  c_cal->add_option("--labels", cal.labels, "Directory of .pgm masks with matching names")->required();
  c_cal->add_option("--out", cal.out, "Output JSON");

  EvalArgs ev;
  auto* c_ev = app.add_subcommand("eval-classifier", "Train the baseline and evaluate a split");
  add_common(c_ev, ev.common);
  c_ev->add_option("--manifest", ev.manifest, "Dataset manifest JSON");
  c_ev->add_option("--split", ev.split, "train, val or test")->check(CLI::IsMember({"train", "val", "test"}));
  c_ev->add_option("--perturb", ev.perturb, "motion_blur=K,noise=S,color=H:S:V");
  c_ev->add_option("--reject", ev.reject, "Reject-to-None similarity threshold");
  c_ev->add_option("--out", ev.out, "Output JSON");

  ReportArgs rep;
  auto* c_rep = app.add_subcommand("report", "Plot-ready series from a run log");
  c_rep->add_option("--log", rep.log, "run.csv from simulate")->required();
  c_rep->add_option("--out", rep.out, "Output directory");

  ManifestArgs man;
  auto* c_man = app.add_subcommand("manifest", "Split a class-per-directory dataset");
  add_common(c_man, man.common);
  c_man->add_option("--root", man.root, "Dataset root");
  c_man->add_option("--fractions", man.fractions, "train,val,test")->delimiter(',')->expected(3);
  c_man->add_option("--out", man.out, "Output JSON");

  GenSignsArgs gs;
  auto* c_gs = app.add_subcommand("gen-signs", "Write the synthetic sign dataset");
  add_common(c_gs, gs.common);
  c_gs->add_option("--out", gs.out, "Dataset root")->required();
  c_gs->add_option("--per-class", gs.per_class, "Images per class");
  c_gs->add_option("--sigma", gs.sigma, "Noise sigma as a fraction of full scale");

  GenFramesArgs gf;
  auto* c_gf = app.add_subcommand("gen-frames", "Render camera frames with ground-truth masks");
  add_common(c_gf, gf.common);
  c_gf->add_option("--preset", gf.preset, "Illumination preset");
  c_gf->add_option("--track", gf.track, "straight, oval or s-curve")
      ->check(CLI::IsMember({"straight", "oval", "s-curve"}));
  c_gf->add_option("--count", gf.count, "Number of frames");
  c_gf->add_option("--out", gf.out, "Output directory")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (c_sim->parsed()) return cmd_simulate(sim, out);
    if (c_cal->parsed()) return cmd_calibrate(cal, out);
    if (c_ev->parsed()) return cmd_eval(ev, out);
    if (c_rep->parsed()) return cmd_report(rep, out);
    if (c_man->parsed()) return cmd_manifest(man, out);
    if (c_gs->parsed()) return cmd_gen_signs(gs, out);
    if (c_gf->parsed()) return cmd_gen_frames(gf, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace lanesim::cli
