#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "lanesim/imaging.hpp"
#include "lanesim/signeval/classifier.hpp"

namespace lanesim::signeval {

enum class Split { train, val, test };

[[nodiscard]] std::string_view to_string(Split s) noexcept;
[[nodiscard]] Split parse_split(std::string_view s);  // throws InvalidInput

struct SplitFractions {
  double train = 0.70;
  double val = 0.15;
  double test = 0.15;

  /// Each fraction is taken to whole basis points; they must sum to 10000.
  void validate() const;
};

struct SplitCounts {
  std::size_t train = 0;
  std::size_t val = 0;
  std::size_t test = 0;

  friend bool operator==(const SplitCounts&, const SplitCounts&) = default;
};

/// Per-class split sizes: val = floor(n*val), test = floor(n*(val+test)) - val,
/// train takes the remainder.
[[nodiscard]] SplitCounts split_counts(std::size_t n, const SplitFractions& f);

struct ManifestEntry {
  std::string path;  // relative to the manifest root, '/' separated
  int label = 0;
  Split split = Split::train;

  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

struct DatasetManifest {
  std::filesystem::path root;
  LabelSet labels = LabelSet::traffic_signs();
  SplitFractions fractions;
  std::uint64_t seed = 0;
  std::vector<ManifestEntry> entries;

  [[nodiscard]] std::vector<ManifestEntry> split(Split s) const;
  [[nodiscard]] std::filesystem::path resolve(const ManifestEntry& e) const { return root / e.path; }
};

/// Scans <root>/<class>/*.ppm|*.pgm. Files are sorted by name, shuffled per
/// class with one seeded generator (classes in label order), then cut into
/// val, test and train in that order.
[[nodiscard]] DatasetManifest build_manifest(const std::filesystem::path& root,
                                             const SplitFractions& fractions, std::uint64_t seed,
                                             const LabelSet& labels = LabelSet::traffic_signs());

[[nodiscard]] std::string manifest_to_json(const DatasetManifest& m);
[[nodiscard]] DatasetManifest manifest_from_json(std::string_view text);
void save_manifest(const std::filesystem::path& path, const DatasetManifest& m);
[[nodiscard]] DatasetManifest load_manifest(const std::filesystem::path& path);

struct LabeledImage {
  Frame image;  // RGB8
  int label = 0;
};

/// Loads a PPM or PGM as RGB8 (gray is replicated into three channels).
[[nodiscard]] Frame load_rgb(const std::filesystem::path& path);

/// Loads every image of a split; missing files raise InvalidInput naming them.
[[nodiscard]] std::vector<LabeledImage> load_split(const DatasetManifest& m, Split s);

}  // namespace lanesim::signeval
