#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "gridhtm/bitmap.hpp"

namespace gridhtm {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

using RgbImage = Grid<Rgb>;

/// Decodes a binary PBM (P4). Set bits become 1. Throws IoError.
Bitmap decode_pbm(std::string_view bytes);
std::string encode_pbm(const Bitmap& bitmap);

/// Decodes a binary PPM (P6) with maxval 255. Throws IoError.
RgbImage decode_ppm(std::string_view bytes);
std::string encode_ppm(const RgbImage& image);

/// Whole-file helpers. Errors name the offending path.
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view bytes);

Bitmap read_pbm(const std::filesystem::path& path);
void write_pbm(const std::filesystem::path& path, const Bitmap& bitmap);
void write_ppm(const std::filesystem::path& path, const RgbImage& image);

/// "00000042" for index 42.
std::string frame_stem(std::uint64_t index);

}  // namespace gridhtm
