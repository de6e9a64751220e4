#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "lanesim/cli.hpp"
#include "lanesim/config.hpp"
#include "lanesim/error.hpp"
#include "lanesim/pnm.hpp"
#include "support.hpp"

using namespace lanesim;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

json read_json(const fs::path& p) { return json::parse(pnm::read_file(p)); }

const fs::path kFixtures{LANESIM_FIXTURE_DIR};

}  // namespace

TEST_CASE("simulate on a clean straight reports zero offset error") {
  const auto dir = testing::temp_dir("cli_straight");
  const auto r = run_cli({"simulate", "--track", "straight", "--duration", "10", "--seed", "1",
                          "--no-noise", "--out", (dir / "a").string()});
  REQUIRE(r.code == cli::kExitOk);
  const auto report = read_json(dir / "a" / "report.json");
  CHECK(report.at("status") == "completed");
  CHECK(report.at("seed") == 1);
  CHECK(report.at("metrics").at("offset_rmse_px").get<double>() == 0.0);
  CHECK(report.at("metrics").at("normalized_rmse_pct").get<double>() == 0.0);
  const auto csv = pnm::read_file(dir / "a" / "run.csv");
  CHECK(csv.find("# seed=1\n") != std::string::npos);
  CHECK(csv.find("# config_hash=" + report.at("config_hash").get<std::string>()) != std::string::npos);
}

TEST_CASE("simulate twice gives byte-identical outputs") {
  const auto dir = testing::temp_dir("cli_repeat");
  for (const char* sub : {"a", "b"}) {
    REQUIRE(run_cli({"simulate", "--duration", "3", "--seed", "4", "--preset", "high", "--out",
                     (dir / sub).string()})
                .code == cli::kExitOk);
  }
  CHECK(pnm::read_file(dir / "a" / "run.csv") == pnm::read_file(dir / "b" / "run.csv"));
  CHECK(pnm::read_file(dir / "a" / "report.json") == pnm::read_file(dir / "b" / "report.json"));
}

TEST_CASE("exit codes") {
  const auto dir = testing::temp_dir("cli_exit");
  CHECK(run_cli({}).code == cli::kExitUsage);
  CHECK(run_cli({"fly"}).code == cli::kExitUsage);
  CHECK(run_cli({"simulate", "--bogus"}).code == cli::kExitUsage);
  CHECK(run_cli({"simulate", "--track", "figure8"}).code == cli::kExitUsage);
  CHECK(run_cli({"simulate", "--preset", "dusk", "--out", dir.string()}).code == cli::kExitUsage);
  CHECK(run_cli({"--help"}).code == cli::kExitOk);

  pnm::write_file(dir / "broken.json", "{ not json");
  const auto broken = run_cli({"simulate", "--config", (dir / "broken.json").string()});
  CHECK(broken.code == cli::kExitUsage);
  CHECK(broken.err.find("config") != std::string::npos);

  pnm::write_file(dir / "bad_alpha.json", R"({"steering": {"alpha": 2.0}})");
  CHECK(run_cli({"simulate", "--config", (dir / "bad_alpha.json").string()}).code == cli::kExitUsage);

  pnm::write_file(dir / "drift.json",
                  R"({"track": {"kind": "straight", "straight_length": 20},
                      "steering": {"k_offset": 0, "k_curv": 0},
                      "vehicle": {"initial_heading_deg": 20}, "duration": 20})");
  const auto off = run_cli({"simulate", "--config", (dir / "drift.json").string(), "--out", dir.string()});
  CHECK(off.code == cli::kExitFailure);
  CHECK(read_json(dir / "report.json").at("status") == "off_track");

  CHECK(run_cli({"report", "--log", (dir / "missing.csv").string()}).code == cli::kExitFailure);
}

TEST_CASE("config path falls back to the environment") {
  const auto dir = testing::temp_dir("cli_env");
  pnm::write_file(dir / "cfg.json", R"({"seed": 77, "duration": 0.5, "track": {"kind": "straight"}})");
  ::setenv("LANESIM_CONFIG", (dir / "cfg.json").string().c_str(), 1);
  const auto r = run_cli({"simulate", "--out", (dir / "out").string()});
  ::unsetenv("LANESIM_CONFIG");
  REQUIRE(r.code == cli::kExitOk);
  const auto report = read_json(dir / "out" / "report.json");
  CHECK(report.at("seed") == 77);
  CHECK(report.at("config").at("track").at("kind") == "straight");
}

TEST_CASE("report reproduces the golden fixture") {
  const auto dir = testing::temp_dir("cli_golden");
  const auto r = run_cli({"report", "--log", (kFixtures / "golden_run.csv").string(), "--out", dir.string()});
  REQUIRE(r.code == cli::kExitOk);
  for (const char* name : {"scatter.csv", "offset_trace.csv", "summary.json"}) {
    CAPTURE(name);
    CHECK(pnm::read_file(dir / name) == pnm::read_file(kFixtures / "golden_report" / name));
  }
}

TEST_CASE("report errors") {
  const auto dir = testing::temp_dir("cli_report_err");
  RunMeta meta;
  meta.image_width = 640;
  meta.theta_max = 30.0;
  pnm::write_file(dir / "empty.csv", export_csv(RunLog(meta)));
  const auto empty = run_cli({"report", "--log", (dir / "empty.csv").string(), "--out", dir.string()});
  CHECK(empty.code == cli::kExitFailure);
  CHECK(empty.err.find("no samples") != std::string::npos);
  CHECK_THROWS_AS((void)cli::build_report(RunLog(meta)), InvalidInput);

  pnm::write_file(dir / "garbage.csv", "# lanesim-runlog v1\nnot,a,header\n");
  const auto garbage = run_cli({"report", "--log", (dir / "garbage.csv").string(), "--out", dir.string()});
  CHECK(garbage.code != cli::kExitOk);
  CHECK(garbage.err.find("line 2") != std::string::npos);
}

TEST_CASE("curvature-steering scatter of an oval run is linear") {
  const auto dir = testing::temp_dir("cli_scatter");
  REQUIRE(run_cli({"simulate", "--duration", "30", "--seed", "2", "--out", dir.string()}).code == cli::kExitOk);
  REQUIRE(run_cli({"report", "--log", (dir / "run.csv").string(), "--out", (dir / "rep").string()}).code ==
          cli::kExitOk);
  const auto summary = read_json(dir / "rep" / "summary.json");
  CHECK(summary.at("fit").at("r_squared").get<double>() >= 0.99);
  CHECK(summary.at("fit").at("slope").get<double>() > 0.0);
  const auto scatter = pnm::read_file(dir / "rep" / "scatter.csv");
  CHECK(scatter.rfind("# lanesim-scatter v1\n# seed=2\n# config_hash=", 0) == 0);
}

TEST_CASE("calibrate pairs frames with labels") {
  const auto dir = testing::temp_dir("cli_calibrate");
  REQUIRE(run_cli({"gen-frames", "--count", "3", "--preset", "high", "--out", dir.string()}).code ==
          cli::kExitOk);
  const auto r = run_cli({"calibrate", "--frames", (dir / "frames").string(), "--labels",
                          (dir / "labels").string(), "--out", (dir / "t.json").string()});
  REQUIRE(r.code == cli::kExitOk);
  const auto t = read_json(dir / "t.json");
  CHECK(t.at("mean_iou").get<double>() > 0.95);
  CHECK_NOTHROW((void)threshold_from_json(t.at("thresholds")));

  fs::copy_file(dir / "frames" / "frame_0000.ppm", dir / "frames" / "extra.ppm");
  fs::remove(dir / "labels" / "frame_0001.pgm");
  const auto unpaired = run_cli({"calibrate", "--frames", (dir / "frames").string(), "--labels",
                                 (dir / "labels").string(), "--out", (dir / "t2.json").string()});
  CHECK(unpaired.code == cli::kExitFailure);
  CHECK(unpaired.err.find("extra.ppm") != std::string::npos);
  CHECK(unpaired.err.find("frame_0001.ppm") != std::string::npos);
  CHECK_FALSE(fs::exists(dir / "t2.json"));
}

TEST_CASE("eval-classifier writes a confusion report") {
  const auto dir = testing::temp_dir("cli_eval");
  REQUIRE(run_cli({"gen-signs", "--out", (dir / "signs").string(), "--per-class", "20", "--seed", "5"}).code ==
          cli::kExitOk);
  REQUIRE(run_cli({"manifest", "--root", (dir / "signs").string(), "--out", (dir / "m.json").string()}).code ==
          cli::kExitOk);
  const auto r = run_cli({"eval-classifier", "--manifest", (dir / "m.json").string(), "--split", "test",
                          "--out", (dir / "eval.json").string()});
  REQUIRE(r.code == cli::kExitOk);
  const auto j = read_json(dir / "eval.json");
  CHECK(j.at("total").get<int>() == 7 * 3);
  CHECK(j.at("accuracy").get<double>() >= 0.9);
  CHECK(j.at("confusion_matrix").size() == 7);
  CHECK(j.contains("config_hash"));

  const auto perturbed = run_cli({"eval-classifier", "--manifest", (dir / "m.json").string(), "--perturb",
                                  "motion_blur=3,noise=0.05", "--out", (dir / "eval_p.json").string()});
  CHECK(perturbed.code == cli::kExitOk);
  CHECK(read_json(dir / "eval_p.json").at("config").at("perturb") == "motion_blur=3,noise=0.05");

  CHECK(run_cli({"eval-classifier", "--manifest", (dir / "m.json").string(), "--split", "holdout"}).code ==
        cli::kExitUsage);
  fs::remove_all(dir / "signs" / "stop");
  CHECK(run_cli({"eval-classifier", "--manifest", (dir / "m.json").string(), "--out",
                 (dir / "eval2.json").string()})
            .code == cli::kExitFailure);
}
