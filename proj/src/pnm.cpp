#include "lanesim/pnm.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "lanesim/error.hpp"

namespace lanesim::pnm {

namespace {

std::string header(char kind, int w, int h) {
  return std::string("P") + kind + "\n" + std::to_string(w) + " " + std::to_string(h) + "\n255\n";
}

struct Cursor {
  std::string_view s;
  std::size_t pos = 0;

  void skip_space_and_comments() {
    while (pos < s.size()) {
      if (std::isspace(static_cast<unsigned char>(s[pos]))) {
        ++pos;
      } else if (s[pos] == '#') {
        while (pos < s.size() && s[pos] != '\n') ++pos;
      } else {
        break;
      }
    }
  }

  int read_int() {
    skip_space_and_comments();
    if (pos >= s.size() || !std::isdigit(static_cast<unsigned char>(s[pos]))) {
      throw InvalidInput("pnm: malformed header");
    }
    long v = 0;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
      v = v * 10 + (s[pos++] - '0');
      if (v > 1'000'000) throw InvalidInput("pnm: header value too large");
    }
    return static_cast<int>(v);
  }
};

struct Raster {
  char kind;
  int width;
  int height;
  std::string_view payload;
};

Raster parse(std::string_view bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '5' && bytes[1] != '6')) {
    throw InvalidInput("pnm: expected P5 or P6 magic");
  }
  Cursor c{bytes, 2};
  const int w = c.read_int();
  const int h = c.read_int();
  const int maxval = c.read_int();
  if (maxval != 255) throw InvalidInput("pnm: only maxval 255 is supported");
  if (c.pos >= bytes.size() || !std::isspace(static_cast<unsigned char>(bytes[c.pos]))) {
    throw InvalidInput("pnm: missing header terminator");
  }
  ++c.pos;
  const std::size_t channels = bytes[1] == '6' ? 3 : 1;
  const std::size_t need = static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * channels;
  if (bytes.size() - c.pos < need) throw InvalidInput("pnm: truncated pixel data");
  return {bytes[1], w, h, bytes.substr(c.pos, need)};
}

std::span<const std::uint8_t> as_bytes(std::string_view s) {
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

}  // namespace

std::string encode_ppm(const Frame& rgb) {
  if (rgb.format() != PixelFormat::rgb8) throw InvalidInput("encode_ppm: expected RGB8");
  const auto bytes = rgb.to_bytes();
  return header('6', rgb.width(), rgb.height()) + std::string(bytes.begin(), bytes.end());
}

std::string encode_pgm(const Frame& gray) {
  if (gray.format() != PixelFormat::gray8) throw InvalidInput("encode_pgm: expected GRAY8");
  const auto bytes = gray.to_bytes();
  return header('5', gray.width(), gray.height()) + std::string(bytes.begin(), bytes.end());
}

std::string encode_pgm(const BinaryMask& mask) {
  std::string out = header('5', mask.width(), mask.height());
  out.reserve(out.size() + mask.bits().size());
  for (const auto b : mask.bits()) out.push_back(static_cast<char>(b ? 255 : 0));
  return out;
}

Frame decode(std::string_view bytes) {
  const Raster r = parse(bytes);
  return Frame::from_bytes(r.width, r.height, r.kind == '6' ? PixelFormat::rgb8 : PixelFormat::gray8,
                           as_bytes(r.payload));
}

BinaryMask decode_mask(std::string_view bytes) {
  const Raster r = parse(bytes);
  if (r.kind != '5') throw InvalidInput("decode_mask: masks must be P5");
  std::vector<std::uint8_t> bits(r.payload.size());
  for (std::size_t i = 0; i < bits.size(); ++i) {
    bits[i] = static_cast<unsigned char>(r.payload[i]) >= 128 ? 1 : 0;
  }
  return BinaryMask(r.width, r.height, std::move(bits));
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return std::move(ss).str();
}

Frame load(const std::filesystem::path& path) { return decode(read_file(path)); }

BinaryMask load_mask(const std::filesystem::path& path) { return decode_mask(read_file(path)); }

void save(const std::filesystem::path& path, const Frame& frame) {
  write_file(path, frame.format() == PixelFormat::gray8 ? encode_pgm(frame) : encode_ppm(frame));
}

void save(const std::filesystem::path& path, const BinaryMask& mask) {
  write_file(path, encode_pgm(mask));
}

}  // namespace lanesim::pnm
