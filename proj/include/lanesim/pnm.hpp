#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "lanesim/imaging.hpp"

namespace lanesim::pnm {

// Binary PPM (P6) for RGB8 frames, PGM (P5) for GRAY8 frames and masks.
// Masks are written 0 -> 0, 1 -> 255 and read back with a 128 cut.

[[nodiscard]] std::string encode_ppm(const Frame& rgb);
[[nodiscard]] std::string encode_pgm(const Frame& gray);
[[nodiscard]] std::string encode_pgm(const BinaryMask& mask);

/// Decodes P6 into RGB8 or P5 into GRAY8.
[[nodiscard]] Frame decode(std::string_view bytes);
[[nodiscard]] BinaryMask decode_mask(std::string_view bytes);

void write_file(const std::filesystem::path& path, std::string_view bytes);
[[nodiscard]] std::string read_file(const std::filesystem::path& path);

[[nodiscard]] Frame load(const std::filesystem::path& path);
[[nodiscard]] BinaryMask load_mask(const std::filesystem::path& path);
void save(const std::filesystem::path& path, const Frame& frame);
void save(const std::filesystem::path& path, const BinaryMask& mask);

}  // namespace lanesim::pnm
