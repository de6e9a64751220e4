#include "lanesim/signeval/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>

#include "lanesim/error.hpp"
#include "lanesim/pnm.hpp"
#include "lanesim/rng.hpp"

namespace lanesim::signeval {
namespace {

enum class Shape { octagon, inverted_triangle, circle, square, diamond, triangle };

struct SignStyle {
  double hue;
  Shape shape;
};

// Hues sit mid-bin of the baseline's 45 degree hue bins.
constexpr std::array<SignStyle, 6> kStyles{{{22.5, Shape::octagon},
                                            {67.5, Shape::inverted_triangle},
                                            {112.5, Shape::circle},
                                            {157.5, Shape::square},
                                            {202.5, Shape::diamond},
                                            {247.5, Shape::triangle}}};

double uniform(std::mt19937_64& gen, double lo, double hi) {
  return lo + (hi - lo) * rng::uniform01(gen);
}

bool inside(Shape s, double dx, double dy, double r) {
  switch (s) {
    case Shape::circle: return dx * dx + dy * dy <= r * r;
    case Shape::square: return std::abs(dx) <= 0.8 * r && std::abs(dy) <= 0.8 * r;
    case Shape::diamond: return std::abs(dx) + std::abs(dy) <= r;
    case Shape::octagon:
      return std::abs(dx) <= 0.92 * r && std::abs(dy) <= 0.92 * r && std::abs(dx) + std::abs(dy) <= 1.3 * r;
    case Shape::triangle: return dy <= 0.7 * r && std::abs(dx) <= 0.6 * (dy + r);
    case Shape::inverted_triangle: return dy >= -0.7 * r && std::abs(dx) <= 0.6 * (r - dy);
  }
  return false;
}

}  // namespace

Frame synthetic_sign(int class_id, std::mt19937_64& gen, const SyntheticSignParams& p) {
  const LabelSet labels = LabelSet::traffic_signs();
  if (class_id < 0 || static_cast<std::size_t>(class_id) >= labels.size()) {
    throw InvalidInput("synthetic_sign: unknown class id");
  }
  if (p.size < 8) throw InvalidInput("synthetic_sign: size must be >= 8");
  if (!(p.noise_sigma >= 0.0)) throw InvalidInput("synthetic_sign: sigma must be >= 0");

  const bool none = class_id == labels.none_id();
  const Hsv bg{0.0F, 0.0F, static_cast<float>(uniform(gen, 0.3, 0.45))};
  Hsv fg;
  Shape shape;
  if (none) {
    fg = {0.0F, 0.0F, static_cast<float>(uniform(gen, 0.1, 0.9))};
    shape = static_cast<Shape>(rng::below(gen, kStyles.size()));
  } else {
    const SignStyle& st = kStyles[static_cast<std::size_t>(class_id)];
    fg = {static_cast<float>(st.hue + uniform(gen, -8.0, 8.0)),
          static_cast<float>(uniform(gen, 0.8, 1.0)), static_cast<float>(uniform(gen, 0.78, 0.95))};
    shape = st.shape;
  }
  const double half = 0.5 * p.size;
  const double cx = half + uniform(gen, -2.0, 2.0);
  const double cy = half + uniform(gen, -2.0, 2.0);
  const double r = p.size * uniform(gen, 0.38, 0.46);
  const Rgb bg_rgb = hsv_pixel_to_rgb(bg);
  const Rgb fg_rgb = hsv_pixel_to_rgb(fg);

  Frame f(p.size, p.size, PixelFormat::rgb8);
  const double sigma = 255.0 * p.noise_sigma;
  for (int y = 0; y < p.size; ++y) {
    for (int x = 0; x < p.size; ++x) {
      const bool in = inside(shape, x + 0.5 - cx, y + 0.5 - cy, r);
      const Rgb& c = in ? fg_rgb : bg_rgb;
      const std::array<double, 3> ch{c.r, c.g, c.b};
      for (int k = 0; k < 3; ++k) {
        const double v = ch[static_cast<std::size_t>(k)] + (sigma > 0.0 ? sigma * rng::normal(gen) : 0.0);
        f.at(x, y, k) = static_cast<float>(std::floor(std::clamp(v, 0.0, 255.0) + 0.5));
      }
    }
  }
  return f;
}

std::vector<LabeledImage> synthetic_sign_set(int per_class, std::uint64_t seed,
                                             const SyntheticSignParams& p) {
  if (per_class < 1) throw InvalidInput("synthetic_sign_set: per_class must be >= 1");
  std::mt19937_64 gen(seed);
  const auto n = static_cast<int>(LabelSet::traffic_signs().size());
  std::vector<LabeledImage> out;
  out.reserve(static_cast<std::size_t>(n * per_class));
  for (int c = 0; c < n; ++c) {
    for (int i = 0; i < per_class; ++i) out.push_back({synthetic_sign(c, gen, p), c});
  }
  return out;
}

void write_synthetic_dataset(const std::filesystem::path& root, int per_class, std::uint64_t seed,
                             const SyntheticSignParams& p) {
  const LabelSet labels = LabelSet::traffic_signs();
  const auto set = synthetic_sign_set(per_class, seed, p);
  for (const auto& name : labels.names()) std::filesystem::create_directories(root / name);
  for (std::size_t i = 0; i < set.size(); ++i) {
    char file[32];
    std::snprintf(file, sizeof file, "img_%04d.ppm", static_cast<int>(i % static_cast<std::size_t>(per_class)));
    pnm::save(root / labels.name(set[i].label) / file, set[i].image);
  }
}

}  // namespace lanesim::signeval
