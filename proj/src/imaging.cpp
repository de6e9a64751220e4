#include "lanesim/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lanesim/error.hpp"

namespace lanesim {

namespace {

std::size_t pixel_count(int width, int height) {
  if (width <= 0 || height <= 0) {
    throw InvalidInput("frame dimensions must be positive, got " + std::to_string(width) + "x" +
                       std::to_string(height));
  }
  return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
}

}  // namespace

Frame::Frame(int width, int height, PixelFormat format)
    : width_(width),
      height_(height),
      format_(format),
      data_(pixel_count(width, height) * static_cast<std::size_t>(channel_count(format)), 0.0F) {}

Frame Frame::from_bytes(int width, int height, PixelFormat format,
                        std::span<const std::uint8_t> bytes) {
  if (format == PixelFormat::hsv) throw InvalidInput("from_bytes: HSV frames are not byte-backed");
  Frame f(width, height, format);
  if (bytes.size() != f.data_.size()) {
    throw InvalidInput("from_bytes: expected " + std::to_string(f.data_.size()) + " bytes, got " +
                       std::to_string(bytes.size()));
  }
  std::transform(bytes.begin(), bytes.end(), f.data_.begin(),
                 [](std::uint8_t b) { return static_cast<float>(b); });
  return f;
}

std::vector<std::uint8_t> Frame::to_bytes() const {
  if (format_ == PixelFormat::hsv) throw InvalidInput("to_bytes: HSV frames are not byte-backed");
  std::vector<std::uint8_t> out(data_.size());
  std::transform(data_.begin(), data_.end(), out.begin(), [](float v) {
    return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
  });
  return out;
}

BinaryMask::BinaryMask(int width, int height, std::uint8_t fill)
    : width_(width), height_(height), bits_(pixel_count(width, height), fill ? 1 : 0) {}

BinaryMask::BinaryMask(int width, int height, std::vector<std::uint8_t> bits)
    : width_(width), height_(height), bits_(std::move(bits)) {
  if (bits_.size() != pixel_count(width, height)) {
    throw InvalidInput("mask buffer size does not match dimensions");
  }
  if (std::any_of(bits_.begin(), bits_.end(), [](std::uint8_t b) { return b > 1; })) {
    throw InvalidInput("mask values must be 0 or 1");
  }
}

std::size_t BinaryMask::count_ones() const noexcept {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

void HsvThreshold::validate() const {
  auto check = [](double lo, double hi, double max, const char* name) {
    if (!(lo <= hi)) throw ConfigError(std::string(name) + " threshold has low > high");
    if (lo < 0.0 || hi > max) throw ConfigError(std::string(name) + " threshold out of range");
  };
  check(h_low, h_high, 360.0, "hue");
  check(s_low, s_high, 1.0, "saturation");
  check(v_low, v_high, 1.0, "value");
}

Hsv rgb_pixel_to_hsv(float r, float g, float b) noexcept {
  const float mx = std::max(r, std::max(g, b));
  const float mn = std::min(r, std::min(g, b));
  const float delta = mx - mn;
  const float inv = delta > 0.0F ? 1.0F / delta : 0.0F;
  const float hr = (g - b) * inv;
  const float hg = (b - r) * inv + 2.0F;
  const float hb = (r - g) * inv + 4.0F;
  float h = 60.0F * (mx == r ? hr : (mx == g ? hg : hb));
  h += h < 0.0F ? 360.0F : 0.0F;
  h -= h >= 360.0F ? 360.0F : 0.0F;
  return {h, mx > 0.0F ? delta / mx : 0.0F, mx / 255.0F};
}

Rgb hsv_pixel_to_rgb(Hsv hsv) noexcept {
  const float v = hsv.v * 255.0F;
  if (hsv.s <= 0.0F) return {v, v, v};
  float h = std::fmod(hsv.h, 360.0F);
  if (h < 0.0F) h += 360.0F;
  const float sector = h / 60.0F;
  const int i = std::min(static_cast<int>(sector), 5);
  const float f = sector - static_cast<float>(i);
  const float p = v * (1.0F - hsv.s);
  const float q = v * (1.0F - hsv.s * f);
  const float t = v * (1.0F - hsv.s * (1.0F - f));
  switch (i) {
    case 0: return {v, t, p};
    case 1: return {q, v, p};
    case 2: return {p, v, t};
    case 3: return {p, q, v};
    case 4: return {t, p, v};
    default: return {v, p, q};
  }
}

Frame rgb_to_hsv(const Frame& rgb) {
  if (rgb.format() != PixelFormat::rgb8) throw InvalidInput("rgb_to_hsv: expected an RGB8 frame");
  Frame out(rgb.width(), rgb.height(), PixelFormat::hsv);
  const auto src = rgb.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < src.size(); i += 3) {
    const Hsv hsv = rgb_pixel_to_hsv(src[i], src[i + 1], src[i + 2]);
    dst[i] = hsv.h;
    dst[i + 1] = hsv.s;
    dst[i + 2] = hsv.v;
  }
  return out;
}

Frame hsv_to_rgb(const Frame& hsv) {
  if (hsv.format() != PixelFormat::hsv) throw InvalidInput("hsv_to_rgb: expected an HSV frame");
  Frame out(hsv.width(), hsv.height(), PixelFormat::rgb8);
  const auto src = hsv.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < src.size(); i += 3) {
    const Rgb c = hsv_pixel_to_rgb({src[i], src[i + 1], src[i + 2]});
    dst[i] = std::clamp(std::round(c.r), 0.0F, 255.0F);
    dst[i + 1] = std::clamp(std::round(c.g), 0.0F, 255.0F);
    dst[i + 2] = std::clamp(std::round(c.b), 0.0F, 255.0F);
  }
  return out;
}

BinaryMask threshold_mask(const Frame& hsv, const HsvThreshold& t) {
  if (hsv.format() != PixelFormat::hsv) throw InvalidInput("threshold_mask: expected an HSV frame");
  t.validate();
  BinaryMask mask(hsv.width(), hsv.height());
  const auto src = hsv.data();
  auto bits = mask.bits();
  for (std::size_t p = 0; p < bits.size(); ++p) {
    bits[p] = t.contains(src[3 * p], src[3 * p + 1], src[3 * p + 2]) ? 1 : 0;
  }
  return mask;
}

double mask_coverage(const BinaryMask& mask, const RectRegion& roi) {
  if (!roi.within(mask.width(), mask.height())) {
    throw InvalidInput("mask_coverage: roi out of bounds");
  }
  std::size_t ones = 0;
  for (int y = roi.y0; y < roi.y1; ++y) {
    for (int x = roi.x0; x < roi.x1; ++x) ones += mask.at(x, y);
  }
  return static_cast<double>(ones) /
         (static_cast<double>(roi.width()) * static_cast<double>(roi.height()));
}

}  // namespace lanesim
