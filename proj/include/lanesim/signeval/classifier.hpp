#pragma once

#include <string>
#include <vector>

#include "lanesim/imaging.hpp"

namespace lanesim::signeval {

/// Registered class names; ids are positions. Exactly one entry is "None".
class LabelSet {
 public:
  explicit LabelSet(std::vector<std::string> names);

  /// Six generic sign classes followed by "None" (id 6).
  static LabelSet traffic_signs();

  [[nodiscard]] std::size_t size() const noexcept { return names_.size(); }
  [[nodiscard]] const std::string& name(int id) const;
  [[nodiscard]] int id(const std::string& name) const;  // throws InvalidInput when unknown
  [[nodiscard]] bool contains(const std::string& name) const noexcept;
  [[nodiscard]] int none_id() const noexcept { return none_id_; }
  [[nodiscard]] const std::vector<std::string>& names() const noexcept { return names_; }

  friend bool operator==(const LabelSet& a, const LabelSet& b) { return a.names_ == b.names_; }

 private:
  std::vector<std::string> names_;
  int none_id_ = -1;
};

inline constexpr const char* kNoneLabel = "None";

struct Prediction {
  int label = 0;
  double confidence = 0.0;  // in [0,1]
};

/// Classifier contract: deterministic for a fixed model state; failures are
/// thrown, never reported as a "None" prediction.
class Classifier {
 public:
  virtual ~Classifier() = default;

  [[nodiscard]] virtual const LabelSet& labels() const = 0;
  [[nodiscard]] virtual Prediction predict(const Frame& rgb) const = 0;
};

/// Checks the frame and the returned prediction against the contract. Any
/// failure inside the classifier surfaces as InferenceError.
[[nodiscard]] Prediction classify(const Classifier& classifier, const Frame& rgb);

}  // namespace lanesim::signeval
