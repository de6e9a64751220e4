#include "lanesim/signeval/perturb.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <random>
#include <sstream>

#include "lanesim/error.hpp"
#include "lanesim/rng.hpp"

namespace lanesim::signeval {
namespace {

float to_byte(double v) { return static_cast<float>(std::floor(std::clamp(v, 0.0, 255.0) + 0.5)); }

void check_rgb(const Frame& f) {
  if (f.format() != PixelFormat::rgb8) throw InvalidInput("perturb: expected an RGB8 frame");
}

Frame blur(const Frame& in, int k) {
  Frame out(in.width(), in.height(), PixelFormat::rgb8);
  const int left = k / 2;
  const int w = in.width();
  for (int y = 0; y < in.height(); ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < 3; ++c) {
        double sum = 0.0;
        for (int i = 0; i < k; ++i) sum += in.at(std::clamp(x - left + i, 0, w - 1), y, c);
        out.at(x, y, c) = to_byte(sum / k);
      }
    }
  }
  return out;
}

Frame shift(const Frame& in, const ColorShift& cs) {
  Frame out(in.width(), in.height(), PixelFormat::rgb8);
  const auto src = in.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < src.size(); i += 3) {
    Hsv hsv = rgb_pixel_to_hsv(src[i], src[i + 1], src[i + 2]);
    double h = std::fmod(hsv.h + cs.dh, 360.0);
    if (h < 0.0) h += 360.0;
    hsv.h = static_cast<float>(h);
    hsv.s = static_cast<float>(std::clamp(hsv.s + cs.ds, 0.0, 1.0));
    hsv.v = static_cast<float>(std::clamp(hsv.v + cs.dv, 0.0, 1.0));
    const Rgb rgb = hsv_pixel_to_rgb(hsv);
    dst[i] = to_byte(rgb.r);
    dst[i + 1] = to_byte(rgb.g);
    dst[i + 2] = to_byte(rgb.b);
  }
  return out;
}

Frame noise(const Frame& in, double sigma, std::uint64_t seed) {
  Frame out = in;
  if (sigma == 0.0) return out;
  std::mt19937_64 gen(seed);
  for (auto& v : out.data()) v = to_byte(v + 255.0 * sigma * rng::normal(gen));
  return out;
}

double parse_number(std::string_view s, std::string_view what) {
  double v = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty()) {
    throw InvalidInput("bad " + std::string(what) + " value '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

void validate(const Perturbation& p) {
  if (const auto* b = std::get_if<MotionBlur>(&p); b && b->k < 1) {
    throw InvalidInput("motion blur length must be >= 1");
  }
  if (const auto* n = std::get_if<GaussianNoise>(&p); n && !(n->sigma >= 0.0)) {
    throw InvalidInput("noise sigma must be >= 0");
  }
  if (const auto* c = std::get_if<ColorShift>(&p);
      c && !(std::isfinite(c->dh) && std::isfinite(c->ds) && std::isfinite(c->dv))) {
    throw InvalidInput("color shift must be finite");
  }
}

Frame perturb(const Frame& rgb, const Perturbation& p, std::uint64_t seed) {
  check_rgb(rgb);
  validate(p);
  if (const auto* b = std::get_if<MotionBlur>(&p)) return b->k == 1 ? rgb : blur(rgb, b->k);
  if (const auto* c = std::get_if<ColorShift>(&p)) return shift(rgb, *c);
  return noise(rgb, std::get<GaussianNoise>(p).sigma, seed);
}

Frame perturb_all(const Frame& rgb, std::span<const Perturbation> ps, std::uint64_t seed) {
  check_rgb(rgb);
  Frame out = rgb;
  for (std::size_t i = 0; i < ps.size(); ++i) out = perturb(out, ps[i], seed + i);
  return out;
}

std::vector<Perturbation> parse_perturbations(std::string_view text) {
  std::vector<Perturbation> out;
  while (!text.empty()) {
    const auto comma = text.find(',');
    const std::string_view item = text.substr(0, comma);
    text = comma == std::string_view::npos ? std::string_view{} : text.substr(comma + 1);
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) throw InvalidInput("perturbation '" + std::string(item) + "' lacks '='");
    const std::string_view key = item.substr(0, eq);
    const std::string_view val = item.substr(eq + 1);
    if (key == "motion_blur") {
      const double k = parse_number(val, "motion_blur");
      if (k != std::floor(k)) throw InvalidInput("motion_blur length must be an integer");
      out.emplace_back(MotionBlur{static_cast<int>(k)});
    } else if (key == "noise") {
      out.emplace_back(GaussianNoise{parse_number(val, "noise")});
    } else if (key == "color") {
      const auto c1 = val.find(':');
      const auto c2 = c1 == std::string_view::npos ? c1 : val.find(':', c1 + 1);
      if (c2 == std::string_view::npos) throw InvalidInput("color expects H:S:V");
      out.emplace_back(ColorShift{parse_number(val.substr(0, c1), "color"),
                                  parse_number(val.substr(c1 + 1, c2 - c1 - 1), "color"),
                                  parse_number(val.substr(c2 + 1), "color")});
    } else {
      throw InvalidInput("unknown perturbation '" + std::string(key) + "'");
    }
    validate(out.back());
  }
  return out;
}

std::string to_string(std::span<const Perturbation> ps) {
  std::ostringstream os;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    if (i > 0) os << ',';
    if (const auto* b = std::get_if<MotionBlur>(&ps[i])) {
      os << "motion_blur=" << b->k;
    } else if (const auto* c = std::get_if<ColorShift>(&ps[i])) {
      os << "color=" << c->dh << ':' << c->ds << ':' << c->dv;
    } else {
      os << "noise=" << std::get<GaussianNoise>(ps[i]).sigma;
    }
  }
  return os.str();
}

}  // namespace lanesim::signeval
