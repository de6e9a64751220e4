#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "lanesim/imaging.hpp"

namespace lanesim {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

/// Source and destination quadrilaterals, corresponding point by point.
struct QuadCorrespondence {
  std::array<Point2, 4> src;
  std::array<Point2, 4> dst;
};

/// 3x3 projective transform, row-major, normalized so h33 == 1 whenever
/// h33 != 0. Construction rejects matrices with |det| <= 1e-12.
class Homography {
 public:
  Homography();  // identity
  explicit Homography(const std::array<double, 9>& m);

  [[nodiscard]] double operator()(int row, int col) const noexcept { return m_[3 * row + col]; }
  [[nodiscard]] const std::array<double, 9>& matrix() const noexcept { return m_; }
  [[nodiscard]] double determinant() const noexcept;

  /// Matrix product; (a * b) applies b first.
  friend Homography operator*(const Homography& a, const Homography& b);

 private:
  std::array<double, 9> m_;
};

/// Solves the 8-equation DLT system with h33 fixed to 1.
[[nodiscard]] Homography homography_from_quads(const QuadCorrespondence& q);

/// x' = (h11 x + h12 y + h13) / (h31 x + h32 y + h33), likewise for y'.
[[nodiscard]] Point2 apply_homography(const Homography& h, Point2 p);

[[nodiscard]] Homography invert(const Homography& h);

/// Inverse-mapping warp: output pixel q samples the source at h^-1(q).
/// Bilinear for RGB8/GRAY8/HSV (8-bit formats are rounded back), zero outside.
[[nodiscard]] Frame warp_image(const Frame& frame, const Homography& h, int out_w, int out_h);

/// Nearest-neighbour variant for masks, which keeps the {0,1} alphabet.
[[nodiscard]] BinaryMask warp_image(const BinaryMask& mask, const Homography& h, int out_w,
                                    int out_h);

/// Precomputed nearest-neighbour lookup for warping many same-sized masks by
/// one homography. Produces exactly the output of warp_image(mask, ...).
class MaskWarper {
 public:
  MaskWarper(const Homography& h, int src_w, int src_h, int out_w, int out_h);

  [[nodiscard]] BinaryMask operator()(const BinaryMask& mask) const;

  [[nodiscard]] int out_width() const noexcept { return out_w_; }
  [[nodiscard]] int out_height() const noexcept { return out_h_; }

 private:
  int src_w_;
  int src_h_;
  int out_w_;
  int out_h_;
  std::vector<std::int32_t> source_index_;  // -1 where the sample falls outside
};

}  // namespace lanesim
