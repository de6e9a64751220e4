#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "lanesim/calibrate.hpp"
#include "lanesim/cli.hpp"
#include "lanesim/config.hpp"
#include "lanesim/control.hpp"
#include "lanesim/error.hpp"
#include "lanesim/geometry.hpp"
#include "lanesim/imaging.hpp"
#include "lanesim/lane.hpp"
#include "lanesim/signeval/dataset.hpp"
#include "lanesim/signeval/metrics.hpp"
#include "lanesim/sim.hpp"
#include "lanesim/telemetry.hpp"

namespace py = pybind11;
using namespace lanesim;

namespace {

using U8Array = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;
using F32Array = py::array_t<float, py::array::c_style | py::array::forcecast>;

Frame rgb_from_array(const U8Array& a) {
  if (a.ndim() != 3 || a.shape(2) != 3) throw InvalidInput("expected an (H, W, 3) uint8 array");
  const auto h = static_cast<int>(a.shape(0));
  const auto w = static_cast<int>(a.shape(1));
  return Frame::from_bytes(w, h, PixelFormat::rgb8, {a.data(), static_cast<std::size_t>(a.size())});
}

Frame hsv_from_array(const F32Array& a) {
  if (a.ndim() != 3 || a.shape(2) != 3) throw InvalidInput("expected an (H, W, 3) float array");
  Frame f(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)), PixelFormat::hsv);
  std::copy(a.data(), a.data() + a.size(), f.data().begin());
  return f;
}

BinaryMask mask_from_array(const U8Array& a) {
  if (a.ndim() != 2) throw InvalidInput("expected an (H, W) mask array");
  std::vector<std::uint8_t> bits(a.data(), a.data() + a.size());
  for (auto& b : bits) b = b != 0 ? 1 : 0;
  return BinaryMask(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)), std::move(bits));
}

py::array_t<float> frame_to_array(const Frame& f) {
  py::array_t<float> out({f.height(), f.width(), f.channels()});
  std::copy(f.data().begin(), f.data().end(), out.mutable_data());
  return out;
}

py::array_t<std::uint8_t> mask_to_array(const BinaryMask& m) {
  py::array_t<std::uint8_t> out({m.height(), m.width()});
  std::copy(m.bits().begin(), m.bits().end(), out.mutable_data());
  return out;
}

py::object json_to_py(const json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

json py_to_json(const py::object& o) {
  if (py::isinstance<py::str>(o)) return json::parse(o.cast<std::string>());
  return json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

SimConfig sim_config(const py::object& config) {
  AppConfig app = config.is_none() ? AppConfig{} : AppConfig::from_json(py_to_json(config));
  app.finalize();
  return app.sim;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Lane-keeping simulator, perception pipeline and evaluation metrics";

  py::register_exception<InvalidInput>(m, "InvalidInput", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<SingularMatrix>(m, "SingularMatrix", PyExc_ArithmeticError);
  py::register_exception<UndefinedCorrelation>(m, "UndefinedCorrelation", PyExc_ArithmeticError);
  py::register_exception<InferenceError>(m, "InferenceError", PyExc_RuntimeError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);

  py::class_<HsvThreshold>(m, "HsvThreshold")
      .def(py::init([](double hl, double hh, double sl, double sh, double vl, double vh) {
             HsvThreshold t{hl, hh, sl, sh, vl, vh};
             t.validate();
             return t;
           }),
           py::arg("h_low") = 0.0, py::arg("h_high") = 360.0, py::arg("s_low") = 0.0,
           py::arg("s_high") = 1.0, py::arg("v_low") = 0.0, py::arg("v_high") = 1.0)
      .def_readwrite("h_low", &HsvThreshold::h_low)
      .def_readwrite("h_high", &HsvThreshold::h_high)
      .def_readwrite("s_low", &HsvThreshold::s_low)
      .def_readwrite("s_high", &HsvThreshold::s_high)
      .def_readwrite("v_low", &HsvThreshold::v_low)
      .def_readwrite("v_high", &HsvThreshold::v_high)
      .def("__eq__", [](const HsvThreshold& a, const HsvThreshold& b) { return a == b; })
      .def("__repr__", [](const HsvThreshold& t) { return "HsvThreshold(" + to_json(t).dump() + ")"; });

  m.def("rgb_to_hsv", [](const U8Array& rgb) { return frame_to_array(rgb_to_hsv(rgb_from_array(rgb))); },
        py::arg("rgb"), "(H, W, 3) uint8 RGB to float HSV: H in degrees, S and V in [0, 1].");
  m.def("threshold_mask",
        [](const F32Array& hsv, const HsvThreshold& t) { return mask_to_array(threshold_mask(hsv_from_array(hsv), t)); },
        py::arg("hsv"), py::arg("thresholds"));

  m.def("homography_from_quads",
        [](const std::array<std::array<double, 2>, 4>& src, const std::array<std::array<double, 2>, 4>& dst) {
          QuadCorrespondence q;
          for (std::size_t i = 0; i < 4; ++i) {
            q.src[i] = {src[i][0], src[i][1]};
            q.dst[i] = {dst[i][0], dst[i][1]};
          }
          const auto& a = homography_from_quads(q).matrix();
          py::array_t<double> out({3, 3});
          std::copy(a.begin(), a.end(), out.mutable_data());
          return out;
        },
        py::arg("src"), py::arg("dst"), "3x3 matrix mapping the src quad onto the dst quad.");
  m.def("apply_homography",
        [](const std::array<double, 9>& h, double x, double y) {
          const Point2 p = apply_homography(Homography(h), {x, y});
          return std::make_pair(p.x, p.y);
        },
        py::arg("h"), py::arg("x"), py::arg("y"));

  py::class_<LaneEstimate>(m, "LaneEstimate")
      .def_readonly("left_x", &LaneEstimate::left_x)
      .def_readonly("right_x", &LaneEstimate::right_x)
      .def_readonly("center_x", &LaneEstimate::center_x)
      .def_readonly("offset_px", &LaneEstimate::offset_px)
      .def_readonly("curvature", &LaneEstimate::curvature)
      .def_readonly("valid", &LaneEstimate::valid)
      .def_readonly("far_valid", &LaneEstimate::far_valid)
      .def_readonly("coverage", &LaneEstimate::coverage);

  m.def("column_histogram",
        [](const U8Array& mask) {
          const BinaryMask b = mask_from_array(mask);
          return column_histogram(b, {0, 0, b.width(), b.height()});
        },
        py::arg("mask"));
  m.def("detect_lane_bounds",
        [](const std::vector<int>& hist, int min_peak) -> std::optional<std::pair<int, int>> {
          const auto b = detect_lane_bounds(hist, min_peak);
          if (!b) return std::nullopt;
          return std::make_pair(b->left_x, b->right_x);
        },
        py::arg("hist"), py::arg("min_peak_count") = 5);
  m.def("estimate_lane",
        [](const U8Array& mask) {
          const BinaryMask b = mask_from_array(mask);
          return estimate_lane(b, LaneDetectorParams::defaults(b.width(), b.height()));
        },
        py::arg("mask"), "Lane estimate of a bird's-eye mask using the default ROI bands.");

  py::class_<SteeringParams>(m, "SteeringParams")
      .def(py::init<>())
      .def_readwrite("k_offset", &SteeringParams::k_offset)
      .def_readwrite("k_curv", &SteeringParams::k_curv)
      .def_readwrite("theta_max", &SteeringParams::theta_max)
      .def_readwrite("alpha", &SteeringParams::alpha)
      .def_readwrite("hold_frames", &SteeringParams::hold_frames);
  m.def("steering_law",
        [](double offset_px, double curvature, int width, const SteeringParams& p) {
          LaneEstimate e;
          e.valid = true;
          e.offset_px = offset_px;
          e.curvature = curvature;
          return steering_law(e, width, p);
        },
        py::arg("offset_px"), py::arg("curvature"), py::arg("width") = 640, py::arg("params") = SteeringParams{});
  m.def("smooth", &smooth, py::arg("prev_smoothed"), py::arg("raw"), py::arg("alpha"));

  m.def("rmse", [](const std::vector<double>& v) { return rmse(v); }, py::arg("series"));
  m.def("normalized_rmse", &normalized_rmse, py::arg("rmse_px"), py::arg("image_width_px"));
  m.def("pearson", [](const std::vector<double>& x, const std::vector<double>& y) { return pearson(x, y); },
        py::arg("x"), py::arg("y"));

  m.def("simulate",
        [](const py::object& config, std::optional<std::uint64_t> seed, std::optional<double> duration,
           std::optional<std::string> preset) {
          AppConfig app = config.is_none() ? AppConfig{} : AppConfig::from_json(py_to_json(config));
          if (preset) app.preset_name = *preset;
          if (seed) app.sim.seed = *seed;
          if (duration) app.sim.duration = *duration;
          app.finalize();
          RunLog log;
          {
            py::gil_scoped_release release;
            log = run_closed_loop(app.sim);
          }
          py::dict out;
          out["csv"] = export_csv(log);
          out["status"] = log.meta().status;
          out["metrics"] = json_to_py(cli::metrics_to_json(summarize(log, app.sim.camera.width)));
          return out;
        },
        py::arg("config") = py::none(), py::arg("seed") = py::none(), py::arg("duration") = py::none(),
        py::arg("preset") = py::none(),
        "Closed-loop run. Returns {'csv', 'status', 'metrics'}; config is a dict or JSON text.");
  m.def("summarize_csv",
        [](const std::string& csv) {
          const RunLog log = import_csv(csv);
          return json_to_py(cli::metrics_to_json(summarize(log, log.meta().image_width)));
        },
        py::arg("csv"));
  m.def("default_config", [] { return json_to_py(AppConfig{}.to_json()); });
  m.def("config_hash", [](const py::object& config) { return config_hash(sim_config(config)); },
        py::arg("config") = py::none());

  m.def("calibrate_thresholds",
        [](const std::vector<U8Array>& frames, const std::vector<U8Array>& masks) {
          if (frames.size() != masks.size()) throw InvalidInput("frames and masks differ in count");
          std::vector<LabeledFrame> set;
          for (std::size_t i = 0; i < frames.size(); ++i) {
            set.push_back({rgb_from_array(frames[i]), mask_from_array(masks[i])});
          }
          const auto r = calibrate_thresholds(set);
          return std::make_pair(r.thresholds, r.mean_iou);
        },
        py::arg("frames"), py::arg("masks"), "Returns (HsvThreshold, mean IoU).");

  m.def("split_counts",
        [](std::size_t n, double train, double val, double test) {
          const auto c = signeval::split_counts(n, {train, val, test});
          return py::make_tuple(c.train, c.val, c.test);
        },
        py::arg("n"), py::arg("train") = 0.70, py::arg("val") = 0.15, py::arg("test") = 0.15);
  m.def("classification_metrics",
        [](const std::vector<std::vector<std::uint64_t>>& matrix) {
          const std::size_t n = matrix.size();
          std::vector<std::uint64_t> counts;
          for (const auto& row : matrix) {
            if (row.size() != n) throw InvalidInput("confusion matrix must be square");
            counts.insert(counts.end(), row.begin(), row.end());
          }
          const auto r = signeval::metrics_from_confusion(signeval::ConfusionMatrix(n, counts));
          py::list f1;
          for (const auto& c : r.per_class) f1.append(c.included ? py::cast(c.f1) : py::none());
          py::dict out;
          out["accuracy"] = r.accuracy;
          out["macro_f1"] = r.macro_f1;
          out["f1"] = f1;
          return out;
        },
        py::arg("matrix"), "Accuracy, macro F1 and per-class F1 of a confusion matrix (rows = truth).");

  m.def("cli",
        [](const std::vector<std::string>& args) {
          std::ostringstream out;
          std::ostringstream err;
          int code = 0;
          {
            py::gil_scoped_release release;
            code = cli::run(args, out, err);
          }
          return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Runs the command-line tool in-process; returns (exit code, stdout, stderr).");
}
