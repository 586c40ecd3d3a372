#include "corrdyn/raster.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

namespace corrdyn {

Complex Window::pixel_center(int col, int row) const noexcept {
  const double px = pixel_size();
  const double left = center.real() - 0.5 * width;
  const double top = center.imag() + 0.5 * height();
  return {left + (col + 0.5) * px, top - (row + 0.5) * px};
}

void Window::validate() const {
  if (!(width > 0.0) || !std::isfinite(width)) throw Error(ErrorCode::InvalidArgument, "window width must be positive");
  if (pixels_x < 1 || pixels_y < 1) throw Error(ErrorCode::InvalidArgument, "window needs at least one pixel");
  if (static_cast<std::int64_t>(pixels_x) * pixels_y > kMaxPixels) {
    throw Error(ErrorCode::InvalidArgument, "window exceeds the 2^26 pixel bound");
  }
}

Window Window::covering_disk(Complex center, double radius, int pixels) {
  return Window{center, 2.0 * radius, pixels, pixels};
}

std::size_t Bitmap::inside_count() const {
  return static_cast<std::size_t>(std::count(data.begin(), data.end(), std::uint16_t{0}));
}

std::uint16_t encode_verdict(const MembershipVerdict& verdict) noexcept {
  if (verdict.inside()) return 0;
  return static_cast<std::uint16_t>(std::min(verdict.steps + 1, 65535));
}

namespace {

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Runs `pixel(z, ws)` over every pixel of the window, band by band.
template <class PixelFn>
Bitmap render_window(const Window& win, const RenderOptions& options, PixelFn pixel) {
  win.validate();
  Bitmap bmp;
  bmp.width = win.pixels_x;
  bmp.height = win.pixels_y;
  bmp.data.assign(static_cast<std::size_t>(bmp.width) * bmp.height, 0);

  const int bands = std::clamp(options.bands, 1, bmp.height);
  const double quarter = 0.25 * win.pixel_size();
  const Complex offsets[4] = {{-quarter, quarter}, {quarter, quarter}, {-quarter, -quarter}, {quarter, -quarter}};

  std::atomic<int> next_band{0};
  auto worker = [&] {
    OrbitWorkspace ws;
    for (int band = next_band++; band < bands; band = next_band++) {
      const int row_begin = static_cast<int>(static_cast<std::int64_t>(band) * bmp.height / bands);
      const int row_end = static_cast<int>(static_cast<std::int64_t>(band + 1) * bmp.height / bands);
      for (int row = row_begin; row < row_end; ++row) {
        for (int col = 0; col < bmp.width; ++col) {
          const Complex z = win.pixel_center(col, row);
          std::uint16_t value;
          if (!options.supersample) {
            value = pixel(z, ws);
          } else {
            value = 1;
            for (const Complex& off : offsets) {
              const std::uint16_t v = pixel(z + off, ws);
              if (v == 0) {
                value = 0;
                break;
              }
              value = std::max(value, v);
            }
          }
          bmp.at(col, row) = value;
        }
      }
    }
  };

  const int threads = std::min(resolve_threads(options.threads), bands);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  return bmp;
}

}  // namespace

Bitmap render_julia(Complex c, const Exponent& exp, const Window& win, const EscapeConfig& cfg,
                    const RenderOptions& options) {
  cfg.validate();
  return render_window(win, options, [&](Complex z, OrbitWorkspace& ws) {
    return encode_verdict(in_filled_julia(z, c, exp, cfg, ws));
  });
}

Bitmap render_multibrot(const Exponent& exp, const Window& win, const EscapeConfig& cfg_proto,
                        const RenderOptions& options) {
  if (cfg_proto.max_iter < 1 || cfg_proto.branch_cap < 1 || !(cfg_proto.lambda_esc > 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "invalid escape configuration prototype");
  }
  return render_window(win, options, [&](Complex c, OrbitWorkspace& ws) {
    EscapeConfig cfg = cfg_proto;
    cfg.radius = escape_radius(exp, std::abs(c), cfg_proto.lambda_esc, cfg_proto.margin);
    if (!(cfg.merge_eps < cfg.radius / 1e4)) cfg.merge_eps = cfg.radius * 1e-9;
    return encode_verdict(in_filled_julia(Complex{}, c, exp, cfg, ws));
  });
}

PointCloud extract_point_cloud(const Bitmap& bmp, const Window& win, CloudMode mode) {
  if (bmp.width != win.pixels_x || bmp.height != win.pixels_y) {
    throw Error(ErrorCode::InvalidArgument, "bitmap and window dimensions differ");
  }
  PointCloud cloud;
  cloud.spacing = win.pixel_size();
  for (int row = 0; row < bmp.height; ++row) {
    for (int col = 0; col < bmp.width; ++col) {
      if (bmp.at(col, row) != 0) continue;
      if (mode == CloudMode::Boundary) {
        const bool edge = (col > 0 && bmp.at(col - 1, row) != 0) ||
                          (col + 1 < bmp.width && bmp.at(col + 1, row) != 0) ||
                          (row > 0 && bmp.at(col, row - 1) != 0) ||
                          (row + 1 < bmp.height && bmp.at(col, row + 1) != 0);
        if (!edge) continue;
      }
      cloud.points.push_back(win.pixel_center(col, row));
    }
  }
  if (cloud.points.empty()) throw Error(ErrorCode::EmptyCloud, "no qualifying pixel in bitmap");
  return cloud;
}

}  // namespace corrdyn
