#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "corrdyn/image_io.hpp"
#include "corrdyn/raster.hpp"
#include "oracles.hpp"

using namespace corrdyn;
namespace fs = std::filesystem;

namespace {

std::pair<int, int> pixel_of(const Window& win, Complex z) {
  const double px = win.pixel_size();
  const int col = static_cast<int>(std::floor((z.real() - (win.center.real() - 0.5 * win.width)) / px));
  const int row = static_cast<int>(std::floor(((win.center.imag() + 0.5 * win.height()) - z.imag()) / px));
  return {col, row};
}

// 2x2 majority with ties counted as Inside.
std::vector<bool> downsample_inside(const Bitmap& fine) {
  std::vector<bool> out;
  for (int row = 0; row < fine.height / 2; ++row) {
    for (int col = 0; col < fine.width / 2; ++col) {
      int inside = 0;
      for (int dy = 0; dy < 2; ++dy) {
        for (int dx = 0; dx < 2; ++dx) inside += fine.at(2 * col + dx, 2 * row + dy) == 0;
      }
      out.push_back(inside >= 2);
    }
  }
  return out;
}

fs::path temp_path(const std::string& name) { return fs::temp_directory_path() / ("corrdyn_test_" + name); }

}  // namespace

TEST_SUITE("raster") {

TEST_CASE("window geometry") {
  const Window win{{1.0, -1.0}, 4.0, 4, 2};
  CHECK(win.height() == 2.0);
  CHECK(win.pixel_size() == 1.0);
  CHECK(win.pixel_center(0, 0) == Complex(-0.5, -0.5));
  CHECK(win.pixel_center(3, 1) == Complex(2.5, -1.5));
  CHECK_THROWS_AS((Window{0.0, 0.0, 4, 4}.validate()), Error);
  CHECK_THROWS_AS((Window{0.0, 1.0, 0, 4}.validate()), Error);
  CHECK_THROWS_AS((Window{0.0, 1.0, 100000, 100000}.validate()), Error);
  const Window disk = Window::covering_disk({0.5, 0.5}, 0.25, 16);
  CHECK(disk.width == 0.5);
  CHECK(disk.pixels_x == 16);
  CHECK(disk.pixels_y == 16);
}

TEST_CASE("render_julia: z^2 gives the closed unit disk") {
  const Window win{0.0, 3.0, 64, 64};
  const Exponent e(2, 1);
  const Bitmap bmp = render_julia(0.0, e, win, make_escape_config(e, 0.0, 200));
  const double px = win.pixel_size();
  for (int row = 0; row < 64; ++row) {
    for (int col = 0; col < 64; ++col) {
      const double m = std::abs(win.pixel_center(col, row));
      if (m < 1.0 - px) CHECK(bmp.at(col, row) == 0);
      if (m > 1.0 + px) CHECK(bmp.at(col, row) != 0);
    }
  }
}

TEST_CASE("render_julia: (4,2) at c = -2") {
  const Window win{0.0, 5.0, 128, 128};
  const Exponent e(4, 2);
  const Bitmap bmp = render_julia(-2.0, e, win, make_escape_config(e, 2.0, 8));
  // K_{-2} has empty interior and no pixel centre of this grid lies on it:
  // the pixel holding z = 2 is sampled at 2.0117 - 0.0195i.  It still
  // survives several steps because it is within a pixel of K.
  CHECK(in_filled_julia(2.0, -2.0, e, make_escape_config(e, 2.0, 8)).inside());
  const auto [c2, r2] = pixel_of(win, 2.0);
  CHECK(std::abs(win.pixel_center(c2, r2) - 2.0) < win.pixel_size());
  CHECK(bmp.at(c2, r2) >= 3);
  const auto [c29, r29] = pixel_of(win, 2.9);
  CHECK(bmp.at(c29, r29) != 0);
}

TEST_CASE("render_julia: (4,2) at c = 0 is symmetric under z -> -z") {
  const Window win{0.0, 3.0, 64, 64};
  const Exponent e(4, 2);
  const Bitmap bmp = render_julia(0.0, e, win, make_escape_config(e, 0.0, 60));
  CHECK(bmp.inside_count() > 0);
  for (int row = 0; row < 64; ++row) {
    for (int col = 0; col < 64; ++col) CHECK((bmp.at(col, row) == 0) == (bmp.at(63 - col, 63 - row) == 0));
  }
}

TEST_CASE("render_multibrot: classical Mandelbrot facts") {
  const Exponent e(2, 1);
  const EscapeConfig proto = make_escape_config(e, 0.0, 300);
  auto value_at = [&](Complex c) {
    const Window win{c, 1e-3, 1, 1};
    return render_multibrot(e, win, proto).at(0, 0);
  };
  CHECK(value_at(0.0) == 0);
  CHECK(value_at(0.25) == 0);
  // the real slice of M is [-2, 1/4], so 0.3 escapes (slowly)
  CHECK(value_at(0.3) == oracle::escape_step_quadratic(0.3, 0.3, escape_radius(e, 0.3, 2.0, 0.05), 299) + 2);
  CHECK(value_at(0.3) > 10);
  CHECK(value_at(1.0) != 0);
  CHECK(value_at(-2.0) == 0);
}

TEST_CASE("render_multibrot: Misiurewicz parameter -2 of (4,2)") {
  const Exponent e(4, 2);
  const Window win{-2.0, 1e-3, 1, 1};
  CHECK(render_multibrot(e, win, make_escape_config(e, 0.0, 200)).at(0, 0) == 0);
}

TEST_CASE("render_multibrot: (5,2) window near a Misiurewicz parameter has inside pixels") {
  const Exponent e(5, 2);
  // the nearest mini-copy covers a single pixel centre at this resolution
  const Window win{{-1.027124, 1.141048}, 1e-3, 768, 768};
  const Bitmap bmp = render_multibrot(e, win, make_escape_config(e, 0.0, 200));
  CHECK(bmp.inside_count() > 0);
  CHECK(bmp.inside_count() < bmp.data.size());
}

TEST_CASE("render_multibrot: q = 1 matches the classical iterator") {
  const Exponent e(2, 1);
  const Window win{{-0.6, 0.0}, 3.2, 96, 90};
  const EscapeConfig proto = make_escape_config(e, 0.0, 150);
  const Bitmap bmp = render_multibrot(e, win, proto);
  int mismatches = 0;
  for (int row = 0; row < win.pixels_y; ++row) {
    for (int col = 0; col < win.pixels_x; ++col) {
      const Complex c = win.pixel_center(col, row);
      const double R = escape_radius(e, std::abs(c), proto.lambda_esc, proto.margin);
      // the engine starts from z_1 = c, so one step is added back
      const int ref = oracle::escape_step_quadratic(c, c, R, proto.max_iter - 1);
      const int expect = ref < 0 ? 0 : ref + 2;
      if (bmp.at(col, row) != expect) ++mismatches;
    }
  }
  CHECK(mismatches == 0);
}

TEST_CASE("rendering is independent of bands and threads") {
  const Exponent e(5, 2);
  const Window win{{-0.2, 0.1}, 3.0, 80, 64};
  // interior live sets saturate branch_cap, so a shallow depth keeps this quick
  const EscapeConfig cfg = make_escape_config(e, 0.5, 12);
  const Bitmap one = render_julia({-0.4, 0.3}, e, win, cfg, RenderOptions{1, 1, false});
  const Bitmap many = render_julia({-0.4, 0.3}, e, win, cfg, RenderOptions{8, 64, false});
  CHECK(one == many);
  const Bitmap m1 = render_multibrot(e, win, cfg, RenderOptions{1, 1, false});
  const Bitmap m8 = render_multibrot(e, win, cfg, RenderOptions{8, 64, false});
  CHECK(m1 == m8);
}

TEST_CASE("refinement consistency on the Mandelbrot window") {
  const Exponent e(2, 1);
  const EscapeConfig proto = make_escape_config(e, 0.0, 200);
  const Window coarse{{-0.7, 0.0}, 3.0, 120, 96};
  const Window fine{coarse.center, coarse.width, 240, 192};
  const Bitmap a = render_multibrot(e, coarse, proto);
  const std::vector<bool> b = downsample_inside(render_multibrot(e, fine, proto));
  std::size_t changed = 0;
  for (std::size_t i = 0; i < b.size(); ++i) changed += (a.data[i] == 0) != b[i];
  CHECK(static_cast<double>(changed) / b.size() <= 0.02);
}

TEST_CASE("supersampling marks a pixel inside when any sample is inside") {
  const Exponent e(2, 1);
  const Window win{0.0, 3.0, 32, 32};
  const EscapeConfig cfg = make_escape_config(e, 0.0, 100);
  const Bitmap plain = render_julia(0.0, e, win, cfg);
  const Bitmap super = render_julia(0.0, e, win, cfg, RenderOptions{0, 64, true});
  CHECK(super.inside_count() >= plain.inside_count());
  for (std::size_t i = 0; i < plain.data.size(); ++i) {
    if (plain.data[i] == 0) CHECK(super.data[i] == 0);
  }
}

TEST_CASE("extract_point_cloud: examples") {
  const Window win{0.0, 3.0, 3, 3};
  Bitmap all{3, 3, std::vector<std::uint16_t>(9, 0)};
  const PointCloud inside = extract_point_cloud(all, win, CloudMode::Inside);
  CHECK(inside.size() == 9);
  CHECK(inside.spacing == 1.0);
  CHECK_THROWS_AS(extract_point_cloud(all, win, CloudMode::Boundary), Error);

  Bitmap centre{3, 3, std::vector<std::uint16_t>(9, 5)};
  centre.at(1, 1) = 0;
  for (CloudMode mode : {CloudMode::Inside, CloudMode::Boundary}) {
    const PointCloud cloud = extract_point_cloud(centre, win, mode);
    REQUIRE(cloud.size() == 1);
    CHECK(cloud.points[0] == Complex(0.0, 0.0));
  }

  Bitmap none{3, 3, std::vector<std::uint16_t>(9, 3)};
  CHECK_THROWS_AS(extract_point_cloud(none, win, CloudMode::Inside), Error);
}

TEST_CASE("encode_verdict") {
  CHECK(encode_verdict(MembershipVerdict{Membership::Inside, 200, false}) == 0);
  CHECK(encode_verdict(MembershipVerdict{Membership::Escaped, 0, false}) == 1);
  CHECK(encode_verdict(MembershipVerdict{Membership::Escaped, 70000, false}) == 65535);
}

}

TEST_SUITE("image_io") {

TEST_CASE("PGM encoding is 16-bit big-endian and round-trips") {
  Bitmap bmp{3, 2, {0, 1, 256, 65535, 7, 4660}};
  const std::string bytes = encode_pgm(bmp);
  const std::string header = "P5\n3 2\n65535\n";
  REQUIRE(bytes.size() == header.size() + 12);
  CHECK(bytes.substr(0, header.size()) == header);
  CHECK(static_cast<unsigned char>(bytes[header.size() + 4]) == 0x01);
  CHECK(static_cast<unsigned char>(bytes[header.size() + 5]) == 0x00);
  CHECK(static_cast<unsigned char>(bytes[header.size() + 10]) == 0x12);
  CHECK(static_cast<unsigned char>(bytes[header.size() + 11]) == 0x34);
  CHECK(decode_pgm(bytes) == bmp);
  CHECK_THROWS_AS(decode_pgm("P2\n1 1\n255\n0"), Error);
  CHECK_THROWS_AS(decode_pgm(header), Error);
}

TEST_CASE("files are written atomically and read back") {
  const fs::path path = temp_path("roundtrip.pgm");
  Bitmap bmp{2, 2, {0, 9, 300, 2}};
  write_pgm(path, bmp);
  CHECK(read_pgm(path) == bmp);
  CHECK_FALSE(fs::exists(path.string() + ".tmp"));
  fs::remove(path);

  const fs::path png = temp_path("preview.png");
  write_png(png, bmp);
  std::ifstream in(png, std::ios::binary);
  char magic[8] = {};
  in.read(magic, 8);
  CHECK(std::string(magic + 1, 3) == "PNG");
  fs::remove(png);

  CHECK_THROWS_AS(read_file(temp_path("does-not-exist")), Error);
  CHECK_THROWS_AS(write_file_atomic(temp_path("no-such-dir") / "x.pgm", "data"), Error);
}

}
