#include "lanesim/signeval/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <json.hpp>

#include "lanesim/error.hpp"
#include "lanesim/pnm.hpp"
#include "lanesim/rng.hpp"

namespace lanesim::signeval {
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

std::int64_t basis_points(double f) { return std::llround(f * 10000.0); }

bool is_image(const fs::path& p) {
  const auto ext = p.extension().string();
  return ext == ".ppm" || ext == ".pgm";
}

}  // namespace

std::string_view to_string(Split s) noexcept {
  switch (s) {
    case Split::train: return "train";
    case Split::val: return "val";
    case Split::test: return "test";
  }
  return "train";
}

Split parse_split(std::string_view s) {
  if (s == "train") return Split::train;
  if (s == "val") return Split::val;
  if (s == "test") return Split::test;
  throw InvalidInput("unknown split '" + std::string(s) + "'");
}

void SplitFractions::validate() const {
  for (double f : {train, val, test}) {
    if (!(f >= 0.0 && f <= 1.0)) throw ConfigError("split fractions must lie in [0,1]");
  }
  if (basis_points(train) + basis_points(val) + basis_points(test) != 10000) {
    throw ConfigError("split fractions must sum to 1");
  }
}

SplitCounts split_counts(std::size_t n, const SplitFractions& f) {
  f.validate();
  const auto bv = static_cast<std::size_t>(basis_points(f.val));
  const auto bt = static_cast<std::size_t>(basis_points(f.test));
  SplitCounts c;
  c.val = n * bv / 10000;
  c.test = n * (bv + bt) / 10000 - c.val;
  c.train = n - c.val - c.test;
  return c;
}

std::vector<ManifestEntry> DatasetManifest::split(Split s) const {
  std::vector<ManifestEntry> out;
  for (const auto& e : entries) {
    if (e.split == s) out.push_back(e);
  }
  return out;
}

DatasetManifest build_manifest(const fs::path& root, const SplitFractions& fractions,
                               std::uint64_t seed, const LabelSet& labels) {
  fractions.validate();
  if (!fs::is_directory(root)) throw InvalidInput("dataset root is not a directory: " + root.string());
  for (const auto& d : fs::directory_iterator(root)) {
    if (d.is_directory() && !labels.contains(d.path().filename().string())) {
      throw InvalidInput("unknown class directory '" + d.path().filename().string() + "'");
    }
  }

  DatasetManifest m;
  m.root = root;
  m.labels = labels;
  m.fractions = fractions;
  m.seed = seed;
  std::mt19937_64 gen(seed);
  for (std::size_t id = 0; id < labels.size(); ++id) {
    const std::string& name = labels.names()[id];
    const fs::path dir = root / name;
    std::vector<std::string> files;
    if (fs::is_directory(dir)) {
      for (const auto& f : fs::directory_iterator(dir)) {
        if (f.is_regular_file() && is_image(f.path())) files.push_back(f.path().filename().string());
      }
    }
    if (files.empty()) throw InvalidInput("class '" + name + "' has no images");
    std::sort(files.begin(), files.end());
    rng::shuffle(std::span<std::string>(files), gen);

    const SplitCounts c = split_counts(files.size(), fractions);
    for (std::size_t i = 0; i < files.size(); ++i) {
      const Split s = i < c.val ? Split::val : (i < c.val + c.test ? Split::test : Split::train);
      m.entries.push_back({name + "/" + files[i], static_cast<int>(id), s});
    }
  }
  return m;
}

std::string manifest_to_json(const DatasetManifest& m) {
  json j;
  j["root"] = m.root.generic_string();
  j["labels"] = m.labels.names();
  j["fractions"] = {{"train", m.fractions.train}, {"val", m.fractions.val}, {"test", m.fractions.test}};
  j["seed"] = m.seed;
  json entries = json::array();
  for (const auto& e : m.entries) {
    entries.push_back({{"path", e.path},
                       {"label", m.labels.name(e.label)},
                       {"split", std::string(to_string(e.split))}});
  }
  j["entries"] = std::move(entries);
  return j.dump(2) + "\n";
}

DatasetManifest manifest_from_json(std::string_view text) {
  try {
    const json j = json::parse(text);
    DatasetManifest m;
    m.root = j.at("root").get<std::string>();
    m.labels = LabelSet(j.at("labels").get<std::vector<std::string>>());
    const auto& f = j.at("fractions");
    m.fractions = {f.at("train").get<double>(), f.at("val").get<double>(), f.at("test").get<double>()};
    m.fractions.validate();
    m.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& e : j.at("entries")) {
      m.entries.push_back({e.at("path").get<std::string>(), m.labels.id(e.at("label").get<std::string>()),
                           parse_split(e.at("split").get<std::string>())});
    }
    return m;
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("malformed manifest: ") + e.what());
  }
}

void save_manifest(const fs::path& path, const DatasetManifest& m) {
  pnm::write_file(path, manifest_to_json(m));
}

DatasetManifest load_manifest(const fs::path& path) {
  DatasetManifest m = manifest_from_json(pnm::read_file(path));
  if (m.root.is_relative()) m.root = path.parent_path() / m.root;
  return m;
}

Frame load_rgb(const fs::path& path) {
  Frame f = pnm::load(path);
  if (f.format() == PixelFormat::rgb8) return f;
  Frame rgb(f.width(), f.height(), PixelFormat::rgb8);
  const auto src = f.data();
  auto dst = rgb.data();
  for (std::size_t i = 0; i < src.size(); ++i) dst[3 * i] = dst[3 * i + 1] = dst[3 * i + 2] = src[i];
  return rgb;
}

std::vector<LabeledImage> load_split(const DatasetManifest& m, Split s) {
  std::vector<LabeledImage> out;
  std::vector<std::string> missing;
  for (const auto& e : m.entries) {
    if (e.split != s) continue;
    const fs::path p = m.resolve(e);
    if (!fs::is_regular_file(p)) {
      missing.push_back(p.string());
      continue;
    }
    out.push_back({load_rgb(p), e.label});
  }
  if (!missing.empty()) {
    std::string msg = "missing images:";
    for (const auto& p : missing) msg += " " + p;
    throw InvalidInput(msg);
  }
  return out;
}

}  // namespace lanesim::signeval
