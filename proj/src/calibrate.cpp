#include "lanesim/calibrate.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "lanesim/error.hpp"

namespace lanesim {
namespace {

// One axis of the search. A value x maps to index floor_edge(x) + ceil_edge(x)
// in [0, 2n], so a threshold [edge(a), edge(b)] covers exactly indices [2a, 2b].
struct Axis {
  int n;
  double range;

  [[nodiscard]] double edge(int k) const { return k * range / n; }
  [[nodiscard]] int size() const { return 2 * n + 1; }

  // -1 when x lies beyond every edge.
  [[nodiscard]] int index(double x) const {
    if (!(x >= 0.0) || x > range) return -1;
    int k = std::clamp(static_cast<int>(std::floor(x * n / range)), 0, n);
    while (k > 0 && edge(k) > x) --k;
    while (k < n && edge(k + 1) <= x) ++k;
    return edge(k) == x ? 2 * k : 2 * k + 1;
  }
};

struct Box {
  std::array<int, 6> b{};  // edge indices: h lo/hi, s lo/hi, v lo/hi
};

// Inclusive 3D prefix sums of all pixels and of truth pixels.
class FrameHistogram {
 public:
  FrameHistogram(const Frame& hsv, const BinaryMask& truth, const std::array<Axis, 3>& axes)
      : nh_(axes[0].size()), ns_(axes[1].size()), nv_(axes[2].size()),
        all_(static_cast<std::size_t>(nh_) * ns_ * nv_, 0),
        hit_(all_.size(), 0) {
    const auto px = hsv.data();
    const auto bits = truth.bits();
    for (std::size_t p = 0; p < bits.size(); ++p) {
      truth_total_ += bits[p];
      const int ih = axes[0].index(px[3 * p]);
      const int is = axes[1].index(px[3 * p + 1]);
      const int iv = axes[2].index(px[3 * p + 2]);
      if (ih < 0 || is < 0 || iv < 0) continue;
      const std::size_t i = at(ih, is, iv);
      ++all_[i];
      hit_[i] += bits[p];
    }
    accumulate(all_);
    accumulate(hit_);
  }

  [[nodiscard]] double iou(const Box& box) const {
    const std::int64_t pred = sum(all_, box);
    const std::int64_t inter = sum(hit_, box);
    const std::int64_t uni = pred + truth_total_ - inter;
    return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
  }

 private:
  [[nodiscard]] std::size_t at(int h, int s, int v) const {
    return (static_cast<std::size_t>(h) * ns_ + s) * nv_ + v;
  }

  void accumulate(std::vector<std::int32_t>& a) const {
    for (int h = 0; h < nh_; ++h)
      for (int s = 0; s < ns_; ++s)
        for (int v = 1; v < nv_; ++v) a[at(h, s, v)] += a[at(h, s, v - 1)];
    for (int h = 0; h < nh_; ++h)
      for (int s = 1; s < ns_; ++s)
        for (int v = 0; v < nv_; ++v) a[at(h, s, v)] += a[at(h, s - 1, v)];
    for (int h = 1; h < nh_; ++h)
      for (int s = 0; s < ns_; ++s)
        for (int v = 0; v < nv_; ++v) a[at(h, s, v)] += a[at(h - 1, s, v)];
  }

  [[nodiscard]] std::int64_t sum(const std::vector<std::int32_t>& a, const Box& box) const {
    const int h0 = 2 * box.b[0] - 1, h1 = 2 * box.b[1];
    const int s0 = 2 * box.b[2] - 1, s1 = 2 * box.b[3];
    const int v0 = 2 * box.b[4] - 1, v1 = 2 * box.b[5];
    auto get = [&](int h, int s, int v) -> std::int64_t {
      if (h < 0 || s < 0 || v < 0) return 0;
      return a[at(h, s, v)];
    };
    return get(h1, s1, v1) - get(h0, s1, v1) - get(h1, s0, v1) - get(h1, s1, v0) +
           get(h0, s0, v1) + get(h0, s1, v0) + get(h1, s0, v0) - get(h0, s0, v0);
  }

  int nh_, ns_, nv_;
  std::vector<std::int32_t> all_;
  std::vector<std::int32_t> hit_;
  std::int64_t truth_total_ = 0;
};

Frame as_hsv(const Frame& image) {
  if (image.format() == PixelFormat::hsv) return image;
  if (image.format() == PixelFormat::rgb8) return rgb_to_hsv(image);
  throw InvalidInput("calibrate: frames must be RGB8 or HSV");
}

void check_pair(const LabeledFrame& f) {
  if (f.image.width() != f.truth.width() || f.image.height() != f.truth.height()) {
    throw InvalidInput("calibrate: frame and truth mask sizes differ");
  }
}

}  // namespace

void CalibrationGrid::validate() const {
  if (hue_bins < 1 || sat_bins < 1 || val_bins < 1) throw ConfigError("calibration bins must be >= 1");
  if (coarse_hue_step < 1 || coarse_sv_step < 1) throw ConfigError("calibration steps must be >= 1");
}

double mask_iou(const BinaryMask& a, const BinaryMask& b) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw InvalidInput("mask_iou: mask sizes differ");
  }
  const auto x = a.bits();
  const auto y = b.bits();
  std::size_t inter = 0;
  std::size_t uni = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    inter += static_cast<std::size_t>(x[i] & y[i]);
    uni += static_cast<std::size_t>(x[i] | y[i]);
  }
  return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

double mean_iou(std::span<const LabeledFrame> frames, const HsvThreshold& t) {
  if (frames.empty()) throw InvalidInput("mean_iou: no frames");
  double total = 0.0;
  for (const auto& f : frames) {
    check_pair(f);
    total += mask_iou(threshold_mask(as_hsv(f.image), t), f.truth);
  }
  return total / static_cast<double>(frames.size());
}

CalibrationResult calibrate_thresholds(std::span<const LabeledFrame> frames,
                                       const CalibrationGrid& grid) {
  if (frames.empty()) throw InvalidInput("calibrate_thresholds: no labeled frames");
  grid.validate();
  const std::array<Axis, 3> axes{Axis{grid.hue_bins, 360.0}, Axis{grid.sat_bins, 1.0},
                                 Axis{grid.val_bins, 1.0}};
  std::vector<FrameHistogram> hists;
  hists.reserve(frames.size());
  for (const auto& f : frames) {
    check_pair(f);
    hists.emplace_back(as_hsv(f.image), f.truth, axes);
  }
  auto score = [&](const Box& box) {
    double total = 0.0;
    for (const auto& h : hists) total += h.iou(box);
    return total / static_cast<double>(hists.size());
  };

  auto coarse_edges = [](int n, int step) {
    std::vector<int> e;
    for (int k = 0; k < n; k += step) e.push_back(k);
    e.push_back(n);
    return e;
  };
  const auto eh = coarse_edges(grid.hue_bins, grid.coarse_hue_step);
  const auto es = coarse_edges(grid.sat_bins, grid.coarse_sv_step);
  const auto ev = coarse_edges(grid.val_bins, grid.coarse_sv_step);

  Box best{{0, grid.hue_bins, 0, grid.sat_bins, 0, grid.val_bins}};
  double best_score = score(best);
  Box box;
  for (std::size_t h0 = 0; h0 < eh.size(); ++h0)
    for (std::size_t h1 = h0; h1 < eh.size(); ++h1)
      for (std::size_t s0 = 0; s0 < es.size(); ++s0)
        for (std::size_t s1 = s0; s1 < es.size(); ++s1)
          for (std::size_t v0 = 0; v0 < ev.size(); ++v0)
            for (std::size_t v1 = v0; v1 < ev.size(); ++v1) {
              box.b = {eh[h0], eh[h1], es[s0], es[s1], ev[v0], ev[v1]};
              const double s = score(box);
              if (s > best_score) {
                best_score = s;
                best = box;
              }
            }

  const std::array<int, 6> limit{grid.hue_bins, grid.hue_bins, grid.sat_bins,
                                 grid.sat_bins, grid.val_bins, grid.val_bins};
  for (bool improved = true; improved;) {
    improved = false;
    for (int d = 0; d < 6; ++d) {
      const bool is_low = d % 2 == 0;
      const int lo = is_low ? 0 : best.b[d - 1];
      const int hi = is_low ? best.b[d + 1] : limit[d];
      for (int k = lo; k <= hi; ++k) {
        Box trial = best;
        trial.b[d] = k;
        const double s = score(trial);
        if (s > best_score) {
          best_score = s;
          best = trial;
          improved = true;
        }
      }
    }
  }

  CalibrationResult out;
  out.thresholds = HsvThreshold{axes[0].edge(best.b[0]), axes[0].edge(best.b[1]),
                                axes[1].edge(best.b[2]), axes[1].edge(best.b[3]),
                                axes[2].edge(best.b[4]), axes[2].edge(best.b[5])};
  out.mean_iou = mean_iou(frames, out.thresholds);
  return out;
}

}  // namespace lanesim
