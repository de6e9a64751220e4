#include "lanesim/signeval/baseline.hpp"

#include <algorithm>
#include <cmath>

#include "lanesim/error.hpp"

namespace lanesim::signeval {

ColorHistogram hsv_histogram(const Frame& rgb) {
  if (rgb.format() != PixelFormat::rgb8) throw InvalidInput("hsv_histogram: expected an RGB8 frame");
  ColorHistogram hist{};
  const auto px = rgb.data();
  const std::size_t n = px.size() / 3;
  if (n == 0) return hist;
  for (std::size_t i = 0; i < px.size(); i += 3) {
    const Hsv c = rgb_pixel_to_hsv(px[i], px[i + 1], px[i + 2]);
    const int hb = std::clamp(static_cast<int>(c.h / (360.0F / kHueBins)), 0, kHueBins - 1);
    const int sb = std::clamp(static_cast<int>(c.s * kSatBins), 0, kSatBins - 1);
    const int vb = std::clamp(static_cast<int>(c.v * kValBins), 0, kValBins - 1);
    hist[static_cast<std::size_t>((hb * kSatBins + sb) * kValBins + vb)] += 1.0;
  }
  for (auto& b : hist) b /= static_cast<double>(n);
  return hist;
}

double histogram_intersection(const ColorHistogram& a, const ColorHistogram& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::min(a[i], b[i]);
  return s;
}

BaselineClassifier::BaselineClassifier(LabelSet labels, std::vector<ColorHistogram> centroids,
                                       double reject_threshold)
    : labels_(std::move(labels)), centroids_(std::move(centroids)), reject_(reject_threshold) {
  if (centroids_.size() != labels_.size()) throw InvalidInput("one centroid per class required");
  if (!(reject_ >= 0.0 && reject_ <= 1.0)) throw ConfigError("reject threshold must lie in [0,1]");
}

BaselineClassifier BaselineClassifier::train(const LabelSet& labels,
                                             std::span<const LabeledImage> samples,
                                             double reject_threshold) {
  std::vector<ColorHistogram> sums(labels.size(), ColorHistogram{});
  std::vector<std::size_t> counts(labels.size(), 0);
  for (const auto& s : samples) {
    if (s.label < 0 || static_cast<std::size_t>(s.label) >= labels.size()) {
      throw InvalidInput("training sample has an unregistered label");
    }
    const ColorHistogram h = hsv_histogram(s.image);
    auto& acc = sums[static_cast<std::size_t>(s.label)];
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += h[i];
    ++counts[static_cast<std::size_t>(s.label)];
  }
  for (std::size_t c = 0; c < labels.size(); ++c) {
    if (counts[c] == 0) throw InvalidInput("class '" + labels.names()[c] + "' has no training images");
    for (auto& b : sums[c]) b /= static_cast<double>(counts[c]);
  }
  return BaselineClassifier(labels, std::move(sums), reject_threshold);
}

BaselineClassifier BaselineClassifier::train(const DatasetManifest& manifest, double reject_threshold) {
  const auto samples = load_split(manifest, Split::train);
  return train(manifest.labels, samples, reject_threshold);
}

Prediction BaselineClassifier::predict(const Frame& rgb) const {
  const ColorHistogram h = hsv_histogram(rgb);
  Prediction best{0, -1.0};
  for (std::size_t c = 0; c < centroids_.size(); ++c) {
    const double s = histogram_intersection(h, centroids_[c]);
    if (s > best.confidence) best = {static_cast<int>(c), s};
  }
  best.confidence = std::clamp(best.confidence, 0.0, 1.0);
  if (best.confidence < reject_) best.label = labels_.none_id();
  return best;
}

}  // namespace lanesim::signeval
