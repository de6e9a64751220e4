#include "lanesim/signeval/classifier.hpp"

#include <algorithm>

#include "lanesim/error.hpp"

namespace lanesim::signeval {

LabelSet::LabelSet(std::vector<std::string> names) : names_(std::move(names)) {
  if (names_.empty()) throw InvalidInput("label set is empty");
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i].empty()) throw InvalidInput("label names must be non-empty");
    if (std::count(names_.begin(), names_.end(), names_[i]) != 1) {
      throw InvalidInput("duplicate label '" + names_[i] + "'");
    }
    if (names_[i] == kNoneLabel) none_id_ = static_cast<int>(i);
  }
  if (none_id_ < 0) throw InvalidInput("label set must contain \"None\"");
}

LabelSet LabelSet::traffic_signs() {
  return LabelSet({"stop", "yield", "speed_limit", "no_entry", "turn_left", "turn_right", kNoneLabel});
}

const std::string& LabelSet::name(int id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= names_.size()) {
    throw InvalidInput("label id " + std::to_string(id) + " out of range");
  }
  return names_[static_cast<std::size_t>(id)];
}

int LabelSet::id(const std::string& name) const {
  const auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) throw InvalidInput("unknown class '" + name + "'");
  return static_cast<int>(it - names_.begin());
}

bool LabelSet::contains(const std::string& name) const noexcept {
  return std::find(names_.begin(), names_.end(), name) != names_.end();
}

Prediction classify(const Classifier& classifier, const Frame& rgb) {
  if (rgb.format() != PixelFormat::rgb8) throw InvalidInput("classify: expected an RGB8 frame");
  Prediction p;
  try {
    p = classifier.predict(rgb);
  } catch (const InferenceError&) {
    throw;
  } catch (const std::exception& e) {
    throw InferenceError(std::string("classifier failed: ") + e.what());
  }
  if (p.label < 0 || static_cast<std::size_t>(p.label) >= classifier.labels().size()) {
    throw InferenceError("classifier returned unregistered label id " + std::to_string(p.label));
  }
  if (!(p.confidence >= 0.0 && p.confidence <= 1.0)) {
    throw InferenceError("classifier confidence outside [0,1]");
  }
  return p;
}

}  // namespace lanesim::signeval
