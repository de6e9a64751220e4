#pragma once

#include <array>
#include <span>
#include <vector>

#include "lanesim/signeval/classifier.hpp"
#include "lanesim/signeval/dataset.hpp"

namespace lanesim::signeval {

inline constexpr int kHueBins = 8;
inline constexpr int kSatBins = 4;
inline constexpr int kValBins = 4;
inline constexpr int kHistSize = kHueBins * kSatBins * kValBins;

using ColorHistogram = std::array<double, kHistSize>;

/// Normalized 8x4x4 HSV histogram of an RGB8 frame; bin index is
/// (h_bin * 4 + s_bin) * 4 + v_bin.
[[nodiscard]] ColorHistogram hsv_histogram(const Frame& rgb);

/// Sum of bin-wise minima; 1 for identical normalized histograms.
[[nodiscard]] double histogram_intersection(const ColorHistogram& a, const ColorHistogram& b);

/// Nearest centroid by histogram intersection. The best class wins with its
/// similarity as confidence; ties go to the lowest id; below reject_threshold
/// the answer is "None".
class BaselineClassifier final : public Classifier {
 public:
  BaselineClassifier(LabelSet labels, std::vector<ColorHistogram> centroids,
                     double reject_threshold = 0.5);

  /// Every class needs at least one sample.
  static BaselineClassifier train(const LabelSet& labels, std::span<const LabeledImage> samples,
                                  double reject_threshold = 0.5);
  static BaselineClassifier train(const DatasetManifest& manifest, double reject_threshold = 0.5);

  [[nodiscard]] const LabelSet& labels() const override { return labels_; }
  [[nodiscard]] Prediction predict(const Frame& rgb) const override;

  [[nodiscard]] const std::vector<ColorHistogram>& centroids() const noexcept { return centroids_; }
  [[nodiscard]] double reject_threshold() const noexcept { return reject_; }

 private:
  LabelSet labels_;
  std::vector<ColorHistogram> centroids_;
  double reject_;
};

}  // namespace lanesim::signeval
