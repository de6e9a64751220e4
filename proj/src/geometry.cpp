#include "lanesim/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "lanesim/error.hpp"

namespace lanesim {

namespace {

constexpr double kDetEpsilon = 1e-12;

std::array<double, 9> normalized(std::array<double, 9> m) {
  if (m[8] != 0.0) {
    const double s = m[8];
    for (auto& v : m) v /= s;
    m[8] = 1.0;
  }
  return m;
}

double det3(const std::array<double, 9>& m) {
  return m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) +
         m[2] * (m[3] * m[7] - m[4] * m[6]);
}

bool collinear(Point2 a, Point2 b, Point2 c) {
  const double cross = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
  const double scale = std::max({std::hypot(b.x - a.x, b.y - a.y), std::hypot(c.x - a.x, c.y - a.y),
                                 1.0});
  return std::abs(cross) <= 1e-9 * scale * scale;
}

void require_non_degenerate(const std::array<Point2, 4>& q, const char* which) {
  for (int skip = 0; skip < 4; ++skip) {
    std::array<Point2, 3> t{};
    int k = 0;
    for (int i = 0; i < 4; ++i) {
      if (i != skip) t[k++] = q[i];
    }
    if (collinear(t[0], t[1], t[2])) {
      throw SingularMatrix(std::string("degenerate ") + which + " quad: three collinear points");
    }
  }
}

// Dense Gaussian elimination with partial pivoting on an n x (n+1) augmented system.
template <std::size_t N>
std::array<double, N> solve(std::array<std::array<double, N + 1>, N> a) {
  for (std::size_t col = 0; col < N; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < N; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    }
    if (std::abs(a[pivot][col]) < 1e-12) throw SingularMatrix("singular homography system");
    std::swap(a[col], a[pivot]);
    for (std::size_t r = 0; r < N; ++r) {
      if (r == col) continue;
      const double f = a[r][col] / a[col][col];
      if (f == 0.0) continue;
      for (std::size_t c = col; c <= N; ++c) a[r][c] -= f * a[col][c];
    }
  }
  std::array<double, N> x{};
  for (std::size_t r = 0; r < N; ++r) x[r] = a[r][N] / a[r][r];
  return x;
}

struct Sample {
  double x;
  double y;
  bool inside;
};

Sample source_point(const std::array<double, 9>& inv, int x, int y) {
  const double xd = x;
  const double yd = y;
  const double den = inv[6] * xd + inv[7] * yd + inv[8];
  if (den == 0.0) return {0.0, 0.0, false};
  return {(inv[0] * xd + inv[1] * yd + inv[2]) / den, (inv[3] * xd + inv[4] * yd + inv[5]) / den,
          true};
}

}  // namespace

Homography::Homography() : m_{1, 0, 0, 0, 1, 0, 0, 0, 1} {}

Homography::Homography(const std::array<double, 9>& m) : m_(normalized(m)) {
  if (!std::all_of(m_.begin(), m_.end(), [](double v) { return std::isfinite(v); })) {
    throw SingularMatrix("homography has non-finite entries");
  }
  if (std::abs(det3(m_)) <= kDetEpsilon) throw SingularMatrix("homography is not invertible");
}

double Homography::determinant() const noexcept { return det3(m_); }

Homography operator*(const Homography& a, const Homography& b) {
  std::array<double, 9> r{};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k) s += a(i, k) * b(k, j);
      r[3 * i + j] = s;
    }
  }
  return Homography(r);
}

Homography homography_from_quads(const QuadCorrespondence& q) {
  require_non_degenerate(q.src, "source");
  require_non_degenerate(q.dst, "destination");
  std::array<std::array<double, 9>, 8> a{};
  for (int i = 0; i < 4; ++i) {
    const auto [x, y] = q.src[i];
    const auto [u, v] = q.dst[i];
    a[2 * i] = {x, y, 1, 0, 0, 0, -u * x, -u * y, u};
    a[2 * i + 1] = {0, 0, 0, x, y, 1, -v * x, -v * y, v};
  }
  const auto h = solve<8>(a);
  return Homography({h[0], h[1], h[2], h[3], h[4], h[5], h[6], h[7], 1.0});
}

Point2 apply_homography(const Homography& h, Point2 p) {
  const double den = h(2, 0) * p.x + h(2, 1) * p.y + h(2, 2);
  if (den == 0.0 || !std::isfinite(den)) throw PointAtInfinity("point maps to infinity");
  return {(h(0, 0) * p.x + h(0, 1) * p.y + h(0, 2)) / den,
          (h(1, 0) * p.x + h(1, 1) * p.y + h(1, 2)) / den};
}

Homography invert(const Homography& h) {
  const auto& m = h.matrix();
  const double det = det3(m);
  if (std::abs(det) <= kDetEpsilon) throw SingularMatrix("cannot invert singular homography");
  const std::array<double, 9> adj{
      m[4] * m[8] - m[5] * m[7], m[2] * m[7] - m[1] * m[8], m[1] * m[5] - m[2] * m[4],
      m[5] * m[6] - m[3] * m[8], m[0] * m[8] - m[2] * m[6], m[2] * m[3] - m[0] * m[5],
      m[3] * m[7] - m[4] * m[6], m[1] * m[6] - m[0] * m[7], m[0] * m[4] - m[1] * m[3]};
  std::array<double, 9> r{};
  for (std::size_t i = 0; i < 9; ++i) r[i] = adj[i] / det;
  return Homography(r);
}

Frame warp_image(const Frame& frame, const Homography& h, int out_w, int out_h) {
  const auto inv = invert(h).matrix();
  Frame out(out_w, out_h, frame.format());
  const int ch = frame.channels();
  const int w = frame.width();
  const int hgt = frame.height();
  const bool quantize = frame.format() != PixelFormat::hsv;
  constexpr double kEdge = 1e-9;
  for (int y = 0; y < out_h; ++y) {
    for (int x = 0; x < out_w; ++x) {
      const Sample s = source_point(inv, x, y);
      if (!s.inside || !(s.x >= -kEdge && s.x <= (w - 1) + kEdge && s.y >= -kEdge &&
                         s.y <= (hgt - 1) + kEdge)) {
        continue;
      }
      const double sx = std::clamp(s.x, 0.0, static_cast<double>(w - 1));
      const double sy = std::clamp(s.y, 0.0, static_cast<double>(hgt - 1));
      const int x0 = std::min(static_cast<int>(sx), w - 1);
      const int y0 = std::min(static_cast<int>(sy), hgt - 1);
      const int x1 = std::min(x0 + 1, w - 1);
      const int y1 = std::min(y0 + 1, hgt - 1);
      const double fx = sx - x0;
      const double fy = sy - y0;
      for (int c = 0; c < ch; ++c) {
        const double top = (1.0 - fx) * frame.at(x0, y0, c) + fx * frame.at(x1, y0, c);
        const double bottom = (1.0 - fx) * frame.at(x0, y1, c) + fx * frame.at(x1, y1, c);
        double v = (1.0 - fy) * top + fy * bottom;
        if (quantize) v = std::clamp(std::round(v), 0.0, 255.0);
        out.at(x, y, c) = static_cast<float>(v);
      }
    }
  }
  return out;
}

BinaryMask warp_image(const BinaryMask& mask, const Homography& h, int out_w, int out_h) {
  return MaskWarper(h, mask.width(), mask.height(), out_w, out_h)(mask);
}

MaskWarper::MaskWarper(const Homography& h, int src_w, int src_h, int out_w, int out_h)
    : src_w_(src_w), src_h_(src_h), out_w_(out_w), out_h_(out_h) {
  if (out_w <= 0 || out_h <= 0 || src_w <= 0 || src_h <= 0) {
    throw InvalidInput("warp: dimensions must be positive");
  }
  const auto inv = invert(h).matrix();
  source_index_.assign(static_cast<std::size_t>(out_w) * static_cast<std::size_t>(out_h), -1);
  for (int y = 0; y < out_h; ++y) {
    for (int x = 0; x < out_w; ++x) {
      const Sample s = source_point(inv, x, y);
      if (!s.inside) continue;
      const double rx = std::floor(s.x + 0.5);
      const double ry = std::floor(s.y + 0.5);
      if (rx < 0 || ry < 0 || rx >= src_w || ry >= src_h) continue;
      source_index_[static_cast<std::size_t>(y) * static_cast<std::size_t>(out_w) +
                    static_cast<std::size_t>(x)] =
          static_cast<std::int32_t>(ry) * src_w + static_cast<std::int32_t>(rx);
    }
  }
}

BinaryMask MaskWarper::operator()(const BinaryMask& mask) const {
  if (mask.width() != src_w_ || mask.height() != src_h_) {
    throw InvalidInput("MaskWarper: mask size differs from the prepared size");
  }
  BinaryMask out(out_w_, out_h_);
  const auto src = mask.bits();
  auto dst = out.bits();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    const auto s = source_index_[i];
    dst[i] = s < 0 ? 0 : src[static_cast<std::size_t>(s)];
  }
  return out;
}

}  // namespace lanesim
