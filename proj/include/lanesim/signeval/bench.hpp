#pragma once

#include <optional>
#include <span>

#include "lanesim/signeval/classifier.hpp"
#include "lanesim/signeval/dataset.hpp"

namespace lanesim::signeval {

struct ClassifierBench {
  int reps = 0;
  double mean_ms = 0.0;
  double std_ms = 0.0;  // population
  double fps = 0.0;     // reps / wall time of the measured loop
  std::optional<double> peak_memory_mb;  // process peak RSS where the platform reports it
  double accuracy = 0.0;
  double macro_f1 = 0.0;
};

/// Times classify() cycling through frames: warmup calls first (not timed),
/// then reps timed calls. Accuracy and macro F1 come from one untimed pass
/// over all frames.
[[nodiscard]] ClassifierBench bench(const Classifier& c, std::span<const LabeledImage> frames,
                                    int warmup, int reps);

}  // namespace lanesim::signeval
