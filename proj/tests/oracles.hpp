#pragma once

#include <algorithm>
#include <vector>

#include "lanesim/imaging.hpp"
#include "lanesim/signeval/dataset.hpp"

namespace testing {

// Nearest centroid recomputed from scratch: per-pixel 8x4x4 HSV bins, class
// means, bin-wise minima, first strict maximum, then rejection to none_id.
inline std::vector<int> nearest_centroid_oracle(const std::vector<lanesim::signeval::LabeledImage>& train,
                                                const std::vector<lanesim::signeval::LabeledImage>& test,
                                                int classes, int none_id, double reject) {
  const auto hist = [](const lanesim::Frame& f) {
    std::vector<double> h(128, 0.0);
    const int n = f.width() * f.height();
    for (int y = 0; y < f.height(); ++y) {
      for (int x = 0; x < f.width(); ++x) {
        const lanesim::Hsv c = lanesim::rgb_pixel_to_hsv(f.at(x, y, 0), f.at(x, y, 1), f.at(x, y, 2));
        const int hb = std::min(7, static_cast<int>(c.h / 45.0F));
        const int sb = std::min(3, static_cast<int>(c.s * 4));
        const int vb = std::min(3, static_cast<int>(c.v * 4));
        h[static_cast<std::size_t>(hb * 16 + sb * 4 + vb)] += 1.0;
      }
    }
    for (auto& v : h) v /= n;
    return h;
  };
  const auto nc = static_cast<std::size_t>(classes);
  std::vector<std::vector<double>> centroid(nc, std::vector<double>(128, 0.0));
  std::vector<int> count(nc, 0);
  for (const auto& s : train) {
    const auto h = hist(s.image);
    const auto c = static_cast<std::size_t>(s.label);
    for (std::size_t i = 0; i < h.size(); ++i) centroid[c][i] += h[i];
    ++count[c];
  }
  for (std::size_t c = 0; c < nc; ++c) {
    for (auto& v : centroid[c]) v /= count[c];
  }
  std::vector<int> out;
  for (const auto& s : test) {
    const auto h = hist(s.image);
    int best = 0;
    double best_sim = -1.0;
    for (std::size_t c = 0; c < nc; ++c) {
      double sim = 0.0;
      for (std::size_t i = 0; i < h.size(); ++i) sim += std::min(h[i], centroid[c][i]);
      if (sim > best_sim) {
        best_sim = sim;
        best = static_cast<int>(c);
      }
    }
    out.push_back(best_sim < reject ? none_id : best);
  }
  return out;
}

}  // namespace testing
