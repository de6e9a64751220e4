#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace lanesim {

enum class PixelFormat { rgb8, hsv, gray8 };

[[nodiscard]] constexpr int channel_count(PixelFormat f) noexcept {
  return f == PixelFormat::gray8 ? 1 : 3;
}

/// Row-major interleaved raster.
///
/// Values are stored as float in their natural units: RGB8/GRAY8 hold integral
/// values in [0,255]; HSV holds H in [0,360) degrees and S, V in [0,1].
class Frame {
 public:
  Frame() = default;
  Frame(int width, int height, PixelFormat format);

  /// Builds an RGB8 (3 channels) or GRAY8 (1 channel) frame from bytes.
  static Frame from_bytes(int width, int height, PixelFormat format,
                          std::span<const std::uint8_t> bytes);

  [[nodiscard]] int width() const noexcept { return width_; }
  [[nodiscard]] int height() const noexcept { return height_; }
  [[nodiscard]] PixelFormat format() const noexcept { return format_; }
  [[nodiscard]] int channels() const noexcept { return channel_count(format_); }
  [[nodiscard]] bool empty() const noexcept { return data_.empty(); }

  [[nodiscard]] float at(int x, int y, int c = 0) const noexcept {
    return data_[index(x, y, c)];
  }
  float& at(int x, int y, int c = 0) noexcept { return data_[index(x, y, c)]; }

  [[nodiscard]] std::span<const float> data() const noexcept { return data_; }
  [[nodiscard]] std::span<float> data() noexcept { return data_; }

  /// Quantized bytes for RGB8/GRAY8 frames.
  [[nodiscard]] std::vector<std::uint8_t> to_bytes() const;

  friend bool operator==(const Frame&, const Frame&) = default;

 private:
  [[nodiscard]] std::size_t index(int x, int y, int c) const noexcept {
    return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
            static_cast<std::size_t>(x)) *
               static_cast<std::size_t>(channels()) +
           static_cast<std::size_t>(c);
  }

  int width_ = 0;
  int height_ = 0;
  PixelFormat format_ = PixelFormat::rgb8;
  std::vector<float> data_;
};

/// One byte per pixel, values in {0,1}.
class BinaryMask {
 public:
  BinaryMask() = default;
  BinaryMask(int width, int height, std::uint8_t fill = 0);
  BinaryMask(int width, int height, std::vector<std::uint8_t> bits);

  [[nodiscard]] int width() const noexcept { return width_; }
  [[nodiscard]] int height() const noexcept { return height_; }

  [[nodiscard]] std::uint8_t at(int x, int y) const noexcept {
    return bits_[static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
                 static_cast<std::size_t>(x)];
  }
  std::uint8_t& at(int x, int y) noexcept {
    return bits_[static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
                 static_cast<std::size_t>(x)];
  }

  [[nodiscard]] std::span<const std::uint8_t> bits() const noexcept { return bits_; }
  [[nodiscard]] std::span<std::uint8_t> bits() noexcept { return bits_; }

  [[nodiscard]] std::size_t count_ones() const noexcept;

  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> bits_;
};

/// Half-open pixel rectangle [x0,x1) x [y0,y1).
struct RectRegion {
  int x0 = 0;
  int y0 = 0;
  int x1 = 0;
  int y1 = 0;

  [[nodiscard]] int width() const noexcept { return x1 - x0; }
  [[nodiscard]] int height() const noexcept { return y1 - y0; }
  [[nodiscard]] bool empty() const noexcept { return x1 <= x0 || y1 <= y0; }
  [[nodiscard]] bool within(int w, int h) const noexcept {
    return 0 <= x0 && x0 < x1 && x1 <= w && 0 <= y0 && y0 < y1 && y1 <= h;
  }

  friend bool operator==(const RectRegion&, const RectRegion&) = default;
};

/// Inclusive per-channel bounds. No hue wraparound: h_low <= h_high.
struct HsvThreshold {
  double h_low = 0.0;
  double h_high = 360.0;
  double s_low = 0.0;
  double s_high = 1.0;
  double v_low = 0.0;
  double v_high = 1.0;

  /// Throws ConfigError on inverted or out-of-range bounds.
  void validate() const;

  [[nodiscard]] bool contains(float h, float s, float v) const noexcept {
    return h_low <= h && h <= h_high && s_low <= s && s <= s_high && v_low <= v && v <= v_high;
  }

  friend bool operator==(const HsvThreshold&, const HsvThreshold&) = default;
};

struct Hsv {
  float h;
  float s;
  float v;
};

/// Hexcone conversion of one 8-bit pixel; achromatic pixels get H = 0.
[[nodiscard]] Hsv rgb_pixel_to_hsv(float r, float g, float b) noexcept;

struct Rgb {
  float r;
  float g;
  float b;
};

/// Inverse hexcone conversion to unquantized [0,255] components.
[[nodiscard]] Rgb hsv_pixel_to_rgb(Hsv hsv) noexcept;

[[nodiscard]] Frame rgb_to_hsv(const Frame& rgb);

/// HSV back to RGB8 (rounded). Used by the renderer and the color perturbation.
[[nodiscard]] Frame hsv_to_rgb(const Frame& hsv);

[[nodiscard]] BinaryMask threshold_mask(const Frame& hsv, const HsvThreshold& t);

/// Fraction of ones inside roi.
[[nodiscard]] double mask_coverage(const BinaryMask& mask, const RectRegion& roi);

}  // namespace lanesim
