#pragma once

// Bitmap serialization: binary 16-bit PGM and 8-bit PNG previews.

#include <filesystem>
#include <string>
#include <string_view>

#include "corrdyn/raster.hpp"

namespace corrdyn {

// "P5\n<w> <h>\n65535\n" followed by big-endian 16-bit samples, row-major.
std::string encode_pgm(const Bitmap& bmp);
Bitmap decode_pgm(std::string_view bytes);

void write_pgm(const std::filesystem::path& path, const Bitmap& bmp);
Bitmap read_pgm(const std::filesystem::path& path);

// 8-bit grayscale, sample = min(value, 255).
void write_png(const std::filesystem::path& path, const Bitmap& bmp);

// Writes to a sibling temporary file and renames it over `path`, so a
// failed write never leaves a partial file behind.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);

std::string read_file(const std::filesystem::path& path);

}  // namespace corrdyn
