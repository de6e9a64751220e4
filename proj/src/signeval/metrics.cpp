#include "lanesim/signeval/metrics.hpp"

#include <json.hpp>

#include "lanesim/error.hpp"

namespace lanesim::signeval {

ConfusionMatrix::ConfusionMatrix(std::size_t n) : n_(n), counts_(n * n, 0) {}

ConfusionMatrix::ConfusionMatrix(std::size_t n, std::vector<std::uint64_t> counts)
    : n_(n), counts_(std::move(counts)) {
  if (counts_.size() != n_ * n_) throw InvalidInput("confusion matrix needs n*n counts");
}

void ConfusionMatrix::add(int truth, int predicted, std::uint64_t count) {
  if (truth < 0 || predicted < 0 || static_cast<std::size_t>(truth) >= n_ ||
      static_cast<std::size_t>(predicted) >= n_) {
    throw InvalidInput("confusion matrix index out of range");
  }
  counts_[static_cast<std::size_t>(truth) * n_ + static_cast<std::size_t>(predicted)] += count;
}

std::uint64_t ConfusionMatrix::at(int truth, int predicted) const {
  if (truth < 0 || predicted < 0 || static_cast<std::size_t>(truth) >= n_ ||
      static_cast<std::size_t>(predicted) >= n_) {
    throw InvalidInput("confusion matrix index out of range");
  }
  return counts_[static_cast<std::size_t>(truth) * n_ + static_cast<std::size_t>(predicted)];
}

std::uint64_t ConfusionMatrix::row_sum(int truth) const {
  std::uint64_t s = 0;
  for (std::size_t p = 0; p < n_; ++p) s += at(truth, static_cast<int>(p));
  return s;
}

std::uint64_t ConfusionMatrix::col_sum(int predicted) const {
  std::uint64_t s = 0;
  for (std::size_t t = 0; t < n_; ++t) s += at(static_cast<int>(t), predicted);
  return s;
}

std::uint64_t ConfusionMatrix::total() const noexcept {
  std::uint64_t s = 0;
  for (auto c : counts_) s += c;
  return s;
}

std::uint64_t ConfusionMatrix::trace() const noexcept {
  std::uint64_t s = 0;
  for (std::size_t i = 0; i < n_; ++i) s += counts_[i * n_ + i];
  return s;
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& other) {
  if (other.n_ != n_) throw InvalidInput("confusion matrix sizes differ");
  for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
  return *this;
}

EvalReport metrics_from_confusion(const ConfusionMatrix& m) {
  const std::uint64_t total = m.total();
  if (total == 0) throw InvalidInput("no evaluated samples");
  EvalReport r;
  r.matrix = m;
  r.accuracy = static_cast<double>(m.trace()) / static_cast<double>(total);
  double f1_sum = 0.0;
  std::size_t included = 0;
  for (std::size_t c = 0; c < m.size(); ++c) {
    const int id = static_cast<int>(c);
    ClassMetrics cm;
    const std::uint64_t tp = m.at(id, id);
    const std::uint64_t predicted = m.col_sum(id);
    cm.support = m.row_sum(id);
    cm.included = cm.support > 0 || predicted > 0;
    cm.precision = predicted > 0 ? static_cast<double>(tp) / static_cast<double>(predicted) : 0.0;
    cm.recall = cm.support > 0 ? static_cast<double>(tp) / static_cast<double>(cm.support) : 0.0;
    const double pr = cm.precision + cm.recall;
    cm.f1 = pr > 0.0 ? 2.0 * cm.precision * cm.recall / pr : 0.0;
    if (cm.included) {
      f1_sum += cm.f1;
      ++included;
    }
    r.per_class.push_back(cm);
  }
  r.macro_f1 = f1_sum / static_cast<double>(included);
  return r;
}

EvalReport evaluate_samples(const Classifier& c, std::span<const LabeledImage> samples,
                            std::span<const Perturbation> ps, std::uint64_t seed) {
  if (samples.empty()) throw InvalidInput("evaluate: split is empty");
  ConfusionMatrix m(c.labels().size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    const Prediction p =
        ps.empty() ? classify(c, s.image)
                   : classify(c, perturb_all(s.image, ps, seed + i * ps.size()));
    m.add(s.label, p.label);
  }
  return metrics_from_confusion(m);
}

EvalReport evaluate(const Classifier& c, const DatasetManifest& manifest, Split split,
                    std::span<const Perturbation> ps, std::uint64_t seed) {
  if (!(manifest.labels == c.labels())) throw InvalidInput("classifier and manifest label sets differ");
  const auto samples = load_split(manifest, split);
  return evaluate_samples(c, samples, ps, seed);
}

std::string report_to_json(const EvalReport& r, const LabelSet& labels) {
  using json = nlohmann::json;
  if (labels.size() != r.matrix.size()) throw InvalidInput("label set does not match the matrix");
  json j;
  j["labels"] = labels.names();
  json rows = json::array();
  for (std::size_t t = 0; t < r.matrix.size(); ++t) {
    json row = json::array();
    for (std::size_t p = 0; p < r.matrix.size(); ++p) {
      row.push_back(r.matrix.at(static_cast<int>(t), static_cast<int>(p)));
    }
    rows.push_back(std::move(row));
  }
  j["confusion_matrix"] = std::move(rows);
  json per = json::array();
  for (std::size_t c = 0; c < r.per_class.size(); ++c) {
    const auto& m = r.per_class[c];
    per.push_back({{"label", labels.names()[c]},
                   {"precision", m.precision},
                   {"recall", m.recall},
                   {"f1", m.f1},
                   {"support", m.support},
                   {"included", m.included}});
  }
  j["per_class"] = std::move(per);
  j["total"] = r.matrix.total();
  j["accuracy"] = r.accuracy;
  j["macro_f1"] = r.macro_f1;
  return j.dump(2) + "\n";
}

}  // namespace lanesim::signeval
