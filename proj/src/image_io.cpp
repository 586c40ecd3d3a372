#include "corrdyn/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>
#include <system_error>

namespace corrdyn {

namespace {

std::filesystem::path temp_sibling(const std::filesystem::path& path) {
  auto tmp = path;
  tmp += ".tmp";
  return tmp;
}

}  // namespace

void write_file_atomic(const std::filesystem::path& path, std::string_view bytes) {
  const auto tmp = temp_sibling(path);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot open " + tmp.string() + " for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) {
      out.close();
      std::error_code ignored;
      std::filesystem::remove(tmp, ignored);
      throw Error(ErrorCode::Io, "short write to " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorCode::Io, "cannot rename onto " + path.string());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string encode_pgm(const Bitmap& bmp) {
  std::string out = "P5\n" + std::to_string(bmp.width) + " " + std::to_string(bmp.height) + "\n65535\n";
  const std::size_t header = out.size();
  out.resize(header + 2 * bmp.data.size());
  for (std::size_t i = 0; i < bmp.data.size(); ++i) {
    out[header + 2 * i] = static_cast<char>(bmp.data[i] >> 8);
    out[header + 2 * i + 1] = static_cast<char>(bmp.data[i] & 0xff);
  }
  return out;
}

Bitmap decode_pgm(std::string_view bytes) {
  std::size_t pos = 0;
  auto skip_space = [&] {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(static_cast<unsigned char>(bytes[pos]))) {
        ++pos;
      } else {
        break;
      }
    }
  };
  auto read_int = [&] {
    skip_space();
    int value = 0;
    auto [ptr, ec] = std::from_chars(bytes.data() + pos, bytes.data() + bytes.size(), value);
    if (ec != std::errc{}) throw Error(ErrorCode::Io, "malformed PGM header");
    pos = static_cast<std::size_t>(ptr - bytes.data());
    return value;
  };
  if (bytes.substr(0, 2) != "P5") throw Error(ErrorCode::Io, "not a binary PGM");
  pos = 2;
  Bitmap bmp;
  bmp.width = read_int();
  bmp.height = read_int();
  const int maxval = read_int();
  if (maxval != 65535 || bmp.width < 1 || bmp.height < 1) throw Error(ErrorCode::Io, "unsupported PGM layout");
  ++pos;  // single whitespace before the raster
  const std::size_t count = static_cast<std::size_t>(bmp.width) * bmp.height;
  if (bytes.size() < pos + 2 * count) throw Error(ErrorCode::Io, "truncated PGM raster");
  bmp.data.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    const auto hi = static_cast<unsigned char>(bytes[pos + 2 * i]);
    const auto lo = static_cast<unsigned char>(bytes[pos + 2 * i + 1]);
    bmp.data[i] = static_cast<std::uint16_t>((hi << 8) | lo);
  }
  return bmp;
}

void write_pgm(const std::filesystem::path& path, const Bitmap& bmp) {
  write_file_atomic(path, encode_pgm(bmp));
}

Bitmap read_pgm(const std::filesystem::path& path) { return decode_pgm(read_file(path)); }

void write_png(const std::filesystem::path& path, const Bitmap& bmp) {
  const auto tmp = temp_sibling(path);
  std::unique_ptr<FILE, int (*)(FILE*)> fp(std::fopen(tmp.c_str(), "wb"), &std::fclose);
  if (!fp) throw Error(ErrorCode::Io, "cannot open " + tmp.string() + " for writing");

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    throw Error(ErrorCode::Io, "libpng initialisation failed");
  }
  std::vector<png_byte> row(static_cast<std::size_t>(bmp.width));
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    fp.reset();
    std::error_code ignored;
    std::filesystem::remove(tmp, ignored);
    throw Error(ErrorCode::Io, "libpng failed writing " + path.string());
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(bmp.width), static_cast<png_uint_32>(bmp.height), 8,
               PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int y = 0; y < bmp.height; ++y) {
    for (int x = 0; x < bmp.width; ++x) {
      row[static_cast<std::size_t>(x)] = static_cast<png_byte>(std::min<int>(bmp.at(x, y), 255));
    }
    png_write_row(png, row.data());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  fp.reset();

  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot rename onto " + path.string());
}

}  // namespace corrdyn
