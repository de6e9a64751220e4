#include <doctest.h>

#include <algorithm>
#include <chrono>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "lanesim/config.hpp"
#include "lanesim/error.hpp"
#include "lanesim/pnm.hpp"
#include "lanesim/signeval/baseline.hpp"
#include "lanesim/signeval/bench.hpp"
#include "lanesim/signeval/dataset.hpp"
#include "lanesim/signeval/metrics.hpp"
#include "lanesim/signeval/perturb.hpp"
#include "lanesim/signeval/synthetic.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace lanesim;
using namespace lanesim::signeval;
namespace fs = std::filesystem;

namespace {

Frame solid(int w, int h, int r, int g, int b) {
  Frame f(w, h, PixelFormat::rgb8);
  auto d = f.data();
  for (std::size_t i = 0; i < d.size(); i += 3) {
    d[i] = static_cast<float>(r);
    d[i + 1] = static_cast<float>(g);
    d[i + 2] = static_cast<float>(b);
  }
  return f;
}

struct FixedClassifier final : Classifier {
  LabelSet set = LabelSet::traffic_signs();
  Prediction answer;
  bool fail = false;
  int delay_ms = 0;

  [[nodiscard]] const LabelSet& labels() const override { return set; }
  [[nodiscard]] Prediction predict(const Frame&) const override {
    if (delay_ms > 0) std::this_thread::sleep_for(std::chrono::milliseconds(delay_ms));
    if (fail) throw std::runtime_error("backend unavailable");
    return answer;
  }
};

ConfusionMatrix random_matrix(std::mt19937_64& g, std::size_t n, double zero_p) {
  ConfusionMatrix m(n);
  for (std::size_t t = 0; t < n; ++t) {
    for (std::size_t p = 0; p < n; ++p) {
      if (lanesim::rng::uniform01(g) >= zero_p) {
        m.add(static_cast<int>(t), static_cast<int>(p), lanesim::rng::below(g, 20) + 1);
      }
    }
  }
  return m;
}

}  // namespace

TEST_CASE("label set") {
  const auto labels = LabelSet::traffic_signs();
  CHECK(labels.size() == 7);
  CHECK(labels.none_id() == 6);
  CHECK(labels.name(6) == kNoneLabel);
  CHECK(labels.id("stop") == 0);
  CHECK_THROWS_AS((void)labels.id("pedestrian"), InvalidInput);
  CHECK_THROWS_AS(LabelSet({"a", "b"}), InvalidInput);
  CHECK_THROWS_AS(LabelSet({"a", "None", "a"}), InvalidInput);
}

TEST_CASE("split counts follow the rounding policy") {
  const SplitFractions f;
  CHECK(split_counts(2270, f) == SplitCounts{1589, 340, 341});
  CHECK(split_counts(10, f) == SplitCounts{7, 1, 2});
  CHECK(split_counts(1, f) == SplitCounts{1, 0, 0});
  SplitFractions bad;
  bad.train = 0.8;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("property: split counts partition every class within one image") {
  std::mt19937_64 g(61);
  for (int i = 0; i < testing::kPropertyCases; ++i) {
    const auto n = static_cast<std::size_t>(testing::uniform_int(g, 1, 5000));
    const auto c = split_counts(n, SplitFractions{});
    REQUIRE(c.train + c.val + c.test == n);
    REQUIRE(std::abs(static_cast<double>(c.train) - 0.70 * static_cast<double>(n)) <= 1.0 + 1e-9);
    REQUIRE(std::abs(static_cast<double>(c.val) - 0.15 * static_cast<double>(n)) <= 1.0 + 1e-9);
    REQUIRE(std::abs(static_cast<double>(c.test) - 0.15 * static_cast<double>(n)) <= 1.0 + 1e-9);
  }
}

TEST_CASE("manifest building") {
  const auto root = testing::temp_dir("manifest");
  write_synthetic_dataset(root, 10, 4);
  const auto a = build_manifest(root, SplitFractions{}, 99);
  const auto b = build_manifest(root, SplitFractions{}, 99);
  CHECK(a.entries == b.entries);
  CHECK_FALSE(build_manifest(root, SplitFractions{}, 100).entries == a.entries);
  CHECK(a.entries.size() == 70);
  for (int c = 0; c < 7; ++c) {
    std::size_t tr = 0;
    std::size_t va = 0;
    std::size_t te = 0;
    for (const auto& e : a.entries) {
      if (e.label != c) continue;
      tr += e.split == Split::train ? 1 : 0;
      va += e.split == Split::val ? 1 : 0;
      te += e.split == Split::test ? 1 : 0;
    }
    CHECK(SplitCounts{tr, va, te} == SplitCounts{7, 1, 2});
  }
  std::vector<std::string> paths;
  for (const auto& e : a.entries) paths.push_back(e.path);
  std::sort(paths.begin(), paths.end());
  CHECK(std::adjacent_find(paths.begin(), paths.end()) == paths.end());

  const auto json_back = manifest_from_json(manifest_to_json(a));
  CHECK(json_back.entries == a.entries);
  CHECK(json_back.seed == 99);
  save_manifest(root / "manifest.json", a);
  const auto loaded = load_manifest(root / "manifest.json");
  CHECK(loaded.entries == a.entries);
  CHECK(load_split(loaded, Split::test).size() == 14);

  fs::remove(root / "stop" / "img_0003.ppm");
  CHECK_THROWS_AS((void)load_split(loaded, Split::train), InvalidInput);
  fs::remove(root / "manifest.json");

  fs::create_directories(root / "pedestrian");
  CHECK_THROWS_AS((void)build_manifest(root, SplitFractions{}, 1), InvalidInput);
  fs::remove_all(root / "pedestrian");
  for (const auto& f : fs::directory_iterator(root / "yield")) fs::remove(f.path());
  CHECK_THROWS_AS((void)build_manifest(root, SplitFractions{}, 1), InvalidInput);
}

TEST_CASE("perturbation examples") {
  std::mt19937_64 g(62);
  const auto img = testing::random_rgb(g, 9, 7);
  CHECK(perturb(img, MotionBlur{1}, 0) == img);
  CHECK(perturb(img, GaussianNoise{0.0}, 0) == img);
  CHECK(perturb(img, ColorShift{}, 0) == img);

  Frame impulse(11, 1, PixelFormat::rgb8);
  impulse.at(5, 0, 0) = 255.0F;
  const auto streak = perturb(impulse, MotionBlur{5}, 0);
  for (int x = 0; x < 11; ++x) CHECK(streak.at(x, 0, 0) == (x >= 3 && x <= 7 ? 51.0F : 0.0F));

  const auto green = perturb(solid(2, 2, 255, 0, 0), ColorShift{120.0, 0.0, 0.0}, 0);
  CHECK(green.at(0, 0, 0) == 0.0F);
  CHECK(green.at(0, 0, 1) == 255.0F);
  CHECK(green.at(0, 0, 2) == 0.0F);

  CHECK_THROWS_AS(validate(MotionBlur{0}), InvalidInput);
  CHECK_THROWS_AS(validate(GaussianNoise{-0.1}), InvalidInput);
  CHECK_THROWS_AS((void)perturb(img, MotionBlur{0}, 0), InvalidInput);

  const auto ps = parse_perturbations("motion_blur=5,noise=0.05,color=10:-0.1:0.2");
  REQUIRE(ps.size() == 3);
  CHECK(std::get<MotionBlur>(ps[0]).k == 5);
  CHECK(std::get<GaussianNoise>(ps[1]).sigma == doctest::Approx(0.05));
  CHECK(std::get<ColorShift>(ps[2]).ds == doctest::Approx(-0.1));
  CHECK(parse_perturbations(to_string(ps)).size() == 3);
  CHECK(to_string(parse_perturbations(to_string(ps))) == to_string(ps));
  CHECK_THROWS_AS((void)parse_perturbations("blur=3"), InvalidInput);
  CHECK_THROWS_AS((void)parse_perturbations("motion_blur=x"), InvalidInput);
}

TEST_CASE("property: motion blur equals direct convolution") {
  std::mt19937_64 g(63);
  for (int i = 0; i < testing::kPropertyCases; ++i) {
    const int w = testing::uniform_int(g, 1, 12);
    const int h = testing::uniform_int(g, 1, 3);
    const int k = testing::uniform_int(g, 1, 9);
    const auto img = testing::random_rgb(g, w, h);
    const auto out = perturb(img, MotionBlur{k}, 0);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        for (int c = 0; c < 3; ++c) {
          double sum = 0.0;
          for (int j = 0; j < k; ++j) {
            const int sx = std::clamp(x - k / 2 + j, 0, w - 1);
            sum += img.at(sx, y, c);
          }
          REQUIRE(out.at(x, y, c) == static_cast<float>(std::floor(sum / k + 0.5)));
        }
      }
    }
  }
}

TEST_CASE("property: perturbations are deterministic in the seed") {
  std::mt19937_64 g(64);
  for (int i = 0; i < testing::kPropertyCases; ++i) {
    const auto img = testing::random_rgb(g, 6, 5);
    const std::vector<Perturbation> ps{MotionBlur{testing::uniform_int(g, 1, 5)},
                                       ColorShift{testing::uniform(g, -90, 90), testing::uniform(g, -0.3, 0.3),
                                                  testing::uniform(g, -0.3, 0.3)},
                                       GaussianNoise{testing::uniform(g, 0.01, 0.2)}};
    const auto seed = lanesim::rng::below(g, 1u << 30);
    const auto a = perturb_all(img, ps, seed);
    REQUIRE(a == perturb_all(img, ps, seed));
    for (const float v : a.data()) REQUIRE((v >= 0.0F && v <= 255.0F && v == std::floor(v)));
  }
}

TEST_CASE("baseline classifier examples") {
  const auto labels = LabelSet::traffic_signs();
  const auto set = synthetic_sign_set(20, 5);
  const auto clf = BaselineClassifier::train(labels, set);

  // A patch whose histogram equals a centroid is its own best match.
  std::vector<LabeledImage> patches;
  const int colors[7][3] = {{200, 30, 30}, {200, 200, 30}, {30, 200, 30}, {30, 200, 200},
                            {30, 30, 200}, {200, 30, 200}, {90, 90, 90}};
  for (int c = 0; c < 7; ++c) patches.push_back({solid(8, 8, colors[c][0], colors[c][1], colors[c][2]), c});
  const auto patch_clf = BaselineClassifier::train(labels, patches);
  for (const auto& p : patches) {
    const auto pred = classify(patch_clf, p.image);
    CHECK(pred.label == p.label);
    CHECK(pred.confidence > 0.9);
  }

  const auto background = solid(32, 32, 96, 96, 96);
  CHECK(classify(clf, background).label == labels.none_id());

  std::vector<LabeledImage> one_each;
  for (int c = 0; c < 7; ++c) one_each.push_back(set[static_cast<std::size_t>(c * 20)]);
  const auto memo = BaselineClassifier::train(labels, one_each);
  CHECK(evaluate_samples(memo, one_each).accuracy == 1.0);

  std::vector<ColorHistogram> same(7, hsv_histogram(patches[2].image));
  const BaselineClassifier tie(labels, same);
  CHECK(tie.predict(patches[2].image).label == 0);

  std::vector<LabeledImage> missing(one_each.begin(), one_each.end() - 1);
  CHECK_THROWS_AS((void)BaselineClassifier::train(labels, missing), InvalidInput);
}

TEST_CASE("synthetic signs: accuracy and brute-force oracle agree") {
  const auto train = synthetic_sign_set(140, 7);
  const auto test = synthetic_sign_set(60, 8);
  const auto clf = BaselineClassifier::train(LabelSet::traffic_signs(), train);
  const auto expected = testing::nearest_centroid_oracle(train, test, 7, 6, 0.5);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < test.size(); ++i) {
    REQUIRE(clf.predict(test[i].image).label == expected[i]);
    correct += expected[i] == test[i].label ? 1 : 0;
  }
  const auto report = evaluate_samples(clf, test);
  CHECK(report.accuracy == static_cast<double>(correct) / static_cast<double>(test.size()));
  CHECK(report.matrix.total() == test.size());
  CHECK(report.accuracy >= 0.95);
}

TEST_CASE("metrics from hand-computed confusion matrices") {
  const auto two = metrics_from_confusion(ConfusionMatrix(2, {9, 1, 2, 8}));
  CHECK(two.accuracy == doctest::Approx(0.85));
  CHECK(two.per_class[0].f1 == doctest::Approx(18.0 / 21.0));
  CHECK(two.per_class[1].f1 == doctest::Approx(16.0 / 19.0));
  CHECK(two.macro_f1 == doctest::Approx(0.5 * (18.0 / 21.0 + 16.0 / 19.0)));

  const auto lopsided = metrics_from_confusion(ConfusionMatrix(2, {5, 0, 5, 0}));
  CHECK(lopsided.accuracy == 0.5);
  CHECK(lopsided.macro_f1 == doctest::Approx(1.0 / 3.0));

  const auto diag = metrics_from_confusion(ConfusionMatrix(3, {4, 0, 0, 0, 0, 0, 0, 0, 2}));
  CHECK(diag.accuracy == 1.0);
  CHECK(diag.macro_f1 == 1.0);
  CHECK_FALSE(diag.per_class[1].included);

  CHECK_THROWS_AS((void)metrics_from_confusion(ConfusionMatrix(3)), InvalidInput);
  CHECK_THROWS_AS(ConfusionMatrix(2, {1, 2, 3}), InvalidInput);
}

TEST_CASE("evaluation report json") {
  const auto r = metrics_from_confusion(ConfusionMatrix(2, {9, 1, 2, 8}));
  const auto j = json::parse(report_to_json(r, LabelSet({"a", "None"})));
  CHECK(j.at("accuracy").get<double>() == doctest::Approx(0.85));
  CHECK(j.at("confusion_matrix").at(1).at(0).get<int>() == 2);
  CHECK(j.at("labels").at(1).get<std::string>() == "None");
}

TEST_CASE("property: macro F1 invariances") {
  std::mt19937_64 g(65);
  for (int i = 0; i < testing::kPropertyCases; ++i) {
    const auto n = static_cast<std::size_t>(testing::uniform_int(g, 2, 7));
    const bool diagonal = lanesim::rng::uniform01(g) < 0.3;
    ConfusionMatrix m(n);
    if (diagonal) {
      for (std::size_t c = 0; c < n; ++c) m.add(static_cast<int>(c), static_cast<int>(c), lanesim::rng::below(g, 5));
      if (m.total() == 0) m.add(0, 0);
    } else {
      m = random_matrix(g, n, 0.6);
      if (m.total() == 0) m.add(0, 1);
    }
    const auto r = metrics_from_confusion(m);
    REQUIRE(r.accuracy >= 0.0);
    REQUIRE(r.accuracy <= 1.0);
    REQUIRE(r.macro_f1 >= 0.0);
    REQUIRE(r.macro_f1 <= 1.0);
    bool is_diag = true;
    for (std::size_t t = 0; t < n; ++t) {
      for (std::size_t p = 0; p < n; ++p) {
        if (t != p && m.at(static_cast<int>(t), static_cast<int>(p)) > 0) is_diag = false;
      }
    }
    REQUIRE((r.macro_f1 == 1.0) == is_diag);

    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    lanesim::rng::shuffle(std::span<int>(perm), g);
    ConfusionMatrix relabeled(n);
    for (std::size_t t = 0; t < n; ++t) {
      for (std::size_t p = 0; p < n; ++p) {
        relabeled.add(perm[t], perm[p], m.at(static_cast<int>(t), static_cast<int>(p)));
      }
    }
    const auto rr = metrics_from_confusion(relabeled);
    REQUIRE(rr.macro_f1 == doctest::Approx(r.macro_f1).epsilon(1e-12));
    REQUIRE(rr.accuracy == r.accuracy);
  }
}

TEST_CASE("property: merged confusion matrices conserve counts") {
  std::mt19937_64 g(66);
  for (int i = 0; i < testing::kPropertyCases; ++i) {
    auto a = random_matrix(g, 4, 0.5);
    const auto b = random_matrix(g, 4, 0.5);
    const auto before = a.total();
    std::vector<std::uint64_t> rows;
    for (int c = 0; c < 4; ++c) rows.push_back(a.row_sum(c) + b.row_sum(c));
    a += b;
    REQUIRE(a.total() == before + b.total());
    for (int c = 0; c < 4; ++c) REQUIRE(a.row_sum(c) == rows[static_cast<std::size_t>(c)]);
  }
}

TEST_CASE("classifier failures surface as inference errors") {
  FixedClassifier c;
  c.fail = true;
  const auto img = solid(4, 4, 10, 20, 30);
  CHECK_THROWS_AS((void)classify(c, img), InferenceError);
  c.fail = false;
  c.answer = {9, 0.5};
  CHECK_THROWS_AS((void)classify(c, img), InferenceError);
  c.answer = {1, 1.5};
  CHECK_THROWS_AS((void)classify(c, img), InferenceError);
  c.answer = {1, 0.5};
  CHECK(classify(c, img).label == 1);
  Frame gray(4, 4, PixelFormat::gray8);
  CHECK_THROWS_AS((void)classify(c, gray), InvalidInput);
  std::vector<LabeledImage> one{{img, 1}};
  c.fail = true;
  CHECK_THROWS_AS((void)evaluate_samples(c, one), InferenceError);
}

TEST_CASE("bench timing with an injected delay") {
  FixedClassifier c;
  c.answer = {2, 0.9};
  c.delay_ms = 10;
  const std::vector<LabeledImage> frames{{solid(4, 4, 1, 2, 3), 2}, {solid(4, 4, 1, 2, 3), 3}};
  const auto b = bench(c, frames, 2, 20);
  CHECK(b.reps == 20);
  CHECK(b.mean_ms >= 8.0);
  CHECK(b.mean_ms <= 12.0);
  CHECK(b.fps >= 80.0);
  CHECK(b.fps <= 120.0);
  CHECK(std::abs(b.fps - 1000.0 / b.mean_ms) <= 0.1 * b.fps);
  CHECK(b.accuracy == 0.5);

  c.delay_ms = 0;
  const auto single = bench(c, frames, 0, 1);
  CHECK(single.std_ms == 0.0);
  CHECK_THROWS_AS((void)bench(c, frames, 0, 0), InvalidInput);

  const auto clf = BaselineClassifier::train(LabelSet::traffic_signs(), synthetic_sign_set(5, 9));
  const auto set = synthetic_sign_set(5, 10);
  const auto first = bench(clf, set, 1, 5);
  const auto second = bench(clf, set, 1, 5);
  CHECK(first.accuracy == second.accuracy);
  CHECK(first.macro_f1 == second.macro_f1);
}
