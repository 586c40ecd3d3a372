#pragma once

// Escape-time rasterization of filled Julia sets and Multibrot sets.

#include <cstdint>
#include <vector>

#include "corrdyn/correspondence.hpp"
#include "corrdyn/orbit.hpp"

namespace corrdyn {

inline constexpr std::int64_t kMaxPixels = std::int64_t{1} << 26;

// Square-pixel viewport.  Row 0 is the top edge (largest imaginary part).
struct Window {
  Complex center;
  double width = 1.0;
  int pixels_x = 1;
  int pixels_y = 1;

  double height() const noexcept { return width * pixels_y / pixels_x; }
  double pixel_size() const noexcept { return width / pixels_x; }
  Complex pixel_center(int col, int row) const noexcept;
  // Throws InvalidArgument for a non-positive width, empty grid or more than 2^26 pixels.
  void validate() const;

  // Square window of `pixels` x `pixels` covering the closed disk |z - center| <= radius.
  static Window covering_disk(Complex center, double radius, int pixels);
};

// 0 = Inside, otherwise escape step + 1 (saturating at 65535).
struct Bitmap {
  int width = 0;
  int height = 0;
  std::vector<std::uint16_t> data;

  std::uint16_t at(int col, int row) const { return data[static_cast<std::size_t>(row) * width + col]; }
  std::uint16_t& at(int col, int row) { return data[static_cast<std::size_t>(row) * width + col]; }
  std::size_t inside_count() const;

  friend bool operator==(const Bitmap&, const Bitmap&) = default;
};

struct PointCloud {
  std::vector<Complex> points;
  // Sampling pitch the cloud was extracted at; 0 when unknown.
  double spacing = 0.0;

  bool empty() const noexcept { return points.empty(); }
  std::size_t size() const noexcept { return points.size(); }
};

struct RenderOptions {
  // 0 selects std::thread::hardware_concurrency().
  int threads = 0;
  // Number of row bands the window is cut into.  The result does not depend on it.
  int bands = 64;
  // Sample the four quarter-pixel offsets; a pixel is Inside when any sample is,
  // otherwise it keeps the largest escape value.
  bool supersample = false;
};

std::uint16_t encode_verdict(const MembershipVerdict& verdict) noexcept;

Bitmap render_julia(Complex c, const Exponent& exp, const Window& win, const EscapeConfig& cfg,
                    const RenderOptions& options = {});

// Parameter-plane render of 0 in K_c.  The escape radius is recomputed per
// pixel from |c| with cfg_proto's lambda_esc and margin.
Bitmap render_multibrot(const Exponent& exp, const Window& win, const EscapeConfig& cfg_proto,
                        const RenderOptions& options = {});

enum class CloudMode { Inside, Boundary };

// Inside: centers of value-0 pixels.  Boundary: value-0 pixels with at least
// one escaped 4-neighbour inside the bitmap.  Throws EmptyCloud when nothing qualifies.
PointCloud extract_point_cloud(const Bitmap& bmp, const Window& win, CloudMode mode);

}  // namespace corrdyn
