#include "lanesim/signeval/bench.hpp"

#include <chrono>
#include <cmath>
#include <vector>

#if defined(__linux__)
#include <sys/resource.h>
#endif

#include "lanesim/error.hpp"
#include "lanesim/signeval/metrics.hpp"

namespace lanesim::signeval {
namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t).count();
}

std::optional<double> peak_rss_mb() {
#if defined(__linux__)
  rusage u{};
  if (getrusage(RUSAGE_SELF, &u) == 0) return static_cast<double>(u.ru_maxrss) / 1024.0;
#endif
  return std::nullopt;
}

}  // namespace

ClassifierBench bench(const Classifier& c, std::span<const LabeledImage> frames, int warmup, int reps) {
  if (reps < 1) throw InvalidInput("bench: reps must be >= 1");
  if (warmup < 0) throw InvalidInput("bench: warmup must be >= 0");
  if (frames.empty()) throw InvalidInput("bench: no frames");
  const auto frame = [&](int i) -> const Frame& {
    return frames[static_cast<std::size_t>(i) % frames.size()].image;
  };
  for (int i = 0; i < warmup; ++i) (void)classify(c, frame(i));

  std::vector<double> times;
  times.reserve(static_cast<std::size_t>(reps));
  const auto start = Clock::now();
  for (int i = 0; i < reps; ++i) {
    const auto t = Clock::now();
    (void)classify(c, frame(i));
    times.push_back(ms_since(t));
  }
  const double total_ms = ms_since(start);

  ClassifierBench b;
  b.reps = reps;
  double sum = 0.0;
  for (double t : times) sum += t;
  b.mean_ms = sum / reps;
  double ss = 0.0;
  for (double t : times) ss += (t - b.mean_ms) * (t - b.mean_ms);
  b.std_ms = std::sqrt(ss / reps);
  b.fps = total_ms > 0.0 ? reps / (total_ms / 1000.0) : 0.0;
  b.peak_memory_mb = peak_rss_mb();

  const EvalReport r = evaluate_samples(c, frames);
  b.accuracy = r.accuracy;
  b.macro_f1 = r.macro_f1;
  return b;
}

}  // namespace lanesim::signeval
