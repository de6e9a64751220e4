#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lanesim/signeval/classifier.hpp"
#include "lanesim/signeval/dataset.hpp"
#include "lanesim/signeval/perturb.hpp"

namespace lanesim::signeval {

/// Rows are true classes, columns predictions.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(std::size_t n);
  /// Row-major n x n counts.
  ConfusionMatrix(std::size_t n, std::vector<std::uint64_t> counts);

  void add(int truth, int predicted, std::uint64_t count = 1);
  [[nodiscard]] std::uint64_t at(int truth, int predicted) const;
  [[nodiscard]] std::size_t size() const noexcept { return n_; }
  [[nodiscard]] std::uint64_t row_sum(int truth) const;
  [[nodiscard]] std::uint64_t col_sum(int predicted) const;
  [[nodiscard]] std::uint64_t total() const noexcept;
  [[nodiscard]] std::uint64_t trace() const noexcept;
  [[nodiscard]] const std::vector<std::uint64_t>& counts() const noexcept { return counts_; }

  ConfusionMatrix& operator+=(const ConfusionMatrix& other);
  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;

 private:
  std::size_t n_;
  std::vector<std::uint64_t> counts_;
};

struct ClassMetrics {
  double precision = 0.0;  // 0 when the class is never predicted
  double recall = 0.0;     // 0 when the class has no samples
  double f1 = 0.0;         // 0 when precision + recall == 0
  std::uint64_t support = 0;
  bool included = true;  // false when the class has neither samples nor predictions
};

struct EvalReport {
  ConfusionMatrix matrix{0};
  std::vector<ClassMetrics> per_class;
  double accuracy = 0.0;
  double macro_f1 = 0.0;  // mean F1 over included classes
};

/// Throws InvalidInput on an empty matrix.
[[nodiscard]] EvalReport metrics_from_confusion(const ConfusionMatrix& m);

/// Classifies each sample, perturbed first when ps is non-empty (sample i
/// uses seed + i * ps.size()).
[[nodiscard]] EvalReport evaluate_samples(const Classifier& c, std::span<const LabeledImage> samples,
                                          std::span<const Perturbation> ps = {},
                                          std::uint64_t seed = 0);

[[nodiscard]] EvalReport evaluate(const Classifier& c, const DatasetManifest& manifest, Split split,
                                  std::span<const Perturbation> ps = {}, std::uint64_t seed = 0);

/// Matrix, per-class precision/recall/F1 and aggregates.
[[nodiscard]] std::string report_to_json(const EvalReport& r, const LabelSet& labels);

}  // namespace lanesim::signeval
