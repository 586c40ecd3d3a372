#include "corrdyn/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <thread>

namespace corrdyn {

Complex log1p(Complex z) {
  const double x = z.real();
  const double y = z.imag();
  // |1 + z|^2 - 1 without forming 1 + z
  return {0.5 * std::log1p(2.0 * x + x * x + y * y), std::atan2(y, 1.0 + x)};
}

Complex expm1(Complex z) {
  const double x = z.real();
  const double y = z.imag();
  const double s = std::sin(0.5 * y);
  return {std::expm1(x) * std::cos(y) - 2.0 * s * s, std::exp(x) * std::sin(y)};
}

// ---------------------------------------------------------------------------
// Koenigs linearization

KoenigsMap::KoenigsMap(Complex fixed_point, Complex multiplier, LocalMap forward, LocalMap inverse,
                       double domain_radius)
    : fixed_point_(fixed_point),
      multiplier_(multiplier),
      forward_(std::move(forward)),
      inverse_(std::move(inverse)),
      domain_radius_(domain_radius) {
  if (!(std::abs(multiplier) > 1.0)) throw Error(ErrorCode::NotRepelling, "Koenigs map needs |lambda| > 1");
  if (!(domain_radius > 0.0)) throw Error(ErrorCode::InvalidArgument, "domain radius must be positive");
}

Complex KoenigsMap::h(Complex z) const {
  const Complex d = z - fixed_point_;
  if (std::abs(d) > domain_radius_) {
    throw Error(ErrorCode::DivergedFromDomain, "h evaluated outside its domain");
  }
  return fixed_point_ + forward_(d);
}

Complex KoenigsMap::phi(Complex z) const {
  Complex d = z - fixed_point_;
  if (std::abs(d) > std::abs(multiplier_) * domain_radius_) {
    throw Error(ErrorCode::DivergedFromDomain, "phi evaluated outside its domain");
  }
  Complex scale{1.0, 0.0};
  Complex estimate = d;
  for (int m = 1; m <= n_limit_; ++m) {
    d = inverse_(d);
    scale *= multiplier_;
    const Complex next = scale * d;
    const bool done = std::abs(next - estimate) < 1e-12 * std::max(1.0, std::abs(next));
    estimate = next;
    if (done) break;
  }
  return estimate;
}

KoenigsMap koenigs_build(const MisiurewiczReport& report, double domain_radius) {
  const int l = report.preperiod;
  const int n = report.period;
  if (static_cast<int>(report.orbit.size()) < l + n + 1) {
    throw Error(ErrorCode::InvalidArgument, "report orbit is shorter than preperiod + period");
  }
  std::vector<Complex> cycle(report.orbit.begin() + l, report.orbit.begin() + l + n);
  const Complex c = report.a;
  const double ratio = report.exponent.ratio();
  for (const Complex& y : cycle) {
    if (y == Complex{} || y == c) throw Error(ErrorCode::BranchPoint, "cycle passes through a branch point");
  }

  // Displacement d at cycle[j] maps to (cycle[j+1] - c)((1 + d / cycle[j])^ratio - 1)
  // at cycle[j+1], which is the univalent branch through the two cycle points.
  auto forward = [cycle, c, ratio](Complex d) {
    for (std::size_t j = 0; j < cycle.size(); ++j) {
      const Complex t = d / cycle[j];
      if (std::abs(t) >= 0.5) throw Error(ErrorCode::DivergedFromDomain, "return map left the branch disk");
      d = (cycle[(j + 1) % cycle.size()] - c) * expm1(ratio * log1p(t));
    }
    return d;
  };
  auto inverse = [cycle, c, ratio](Complex d) {
    for (std::size_t j = cycle.size(); j-- > 0;) {
      const Complex t = d / (cycle[(j + 1) % cycle.size()] - c);
      if (std::abs(t) >= 0.5) throw Error(ErrorCode::DivergedFromDomain, "inverse branch left the branch disk");
      d = cycle[j] * expm1(log1p(t) / ratio);
    }
    return d;
  };
  return KoenigsMap(cycle.front(), report.multiplier, forward, inverse, domain_radius);
}

std::vector<PointCloud> limit_model(const PointCloud& K_cloud, const KoenigsMap& koenigs,
                                    std::span<const Complex> pushforward_derivs) {
  std::vector<PointCloud> models;
  PointCloud base;
  base.spacing = K_cloud.spacing;
  base.points.reserve(K_cloud.size());
  for (const Complex& z : K_cloud.points) base.points.push_back(koenigs.phi(z));
  models.push_back(std::move(base));
  for (const Complex& factor : pushforward_derivs) {
    PointCloud next = models.back();
    for (Complex& z : next.points) z *= factor;
    next.spacing *= std::abs(factor);
    models.push_back(std::move(next));
  }
  return models;
}

// ---------------------------------------------------------------------------
// Truncation and Hausdorff distance

int default_circle_samples(double r, double pixel) {
  if (!(pixel > 0.0)) return 256;
  return std::max(256, static_cast<int>(std::ceil(2.0 * std::numbers::pi * r / pixel)));
}

PointCloud truncate_normalize(const PointCloud& A, Complex center, Complex factor, double r, int circle_samples) {
  if (!(r > 0.0)) throw Error(ErrorCode::InvalidArgument, "truncation radius must be positive");
  if (circle_samples < 64) throw Error(ErrorCode::InvalidArgument, "need at least 64 circle samples");
  PointCloud out;
  out.spacing = A.spacing * std::abs(factor);
  out.points.reserve(A.size() + static_cast<std::size_t>(circle_samples));
  const double r_sq = r * r;
  for (const Complex& a : A.points) {
    const Complex w = factor * (a - center);
    if (std::norm(w) <= r_sq) out.points.push_back(w);
  }
  for (int i = 0; i < circle_samples; ++i) {
    out.points.push_back(std::polar(r, 2.0 * std::numbers::pi * i / circle_samples));
  }
  return out;
}

namespace {

// Uniform bucket grid over a fixed bounding box.
class GridIndex {
 public:
  GridIndex(std::span<const Complex> points, double min_x, double min_y, double max_x, double max_y)
      : points_(points), min_x_(min_x), min_y_(min_y) {
    const double extent = std::max({max_x - min_x, max_y - min_y, 1e-300});
    const double target = std::max(1.0, std::sqrt(static_cast<double>(points.size())));
    cell_ = extent / std::min(target, 2048.0);
    nx_ = std::max(1, static_cast<int>((max_x - min_x) / cell_) + 1);
    ny_ = std::max(1, static_cast<int>((max_y - min_y) / cell_) + 1);
    std::vector<int> counts(static_cast<std::size_t>(nx_) * ny_ + 1, 0);
    std::vector<int> cell_of(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
      cell_of[i] = cell_index(points[i]);
      ++counts[static_cast<std::size_t>(cell_of[i]) + 1];
    }
    for (std::size_t i = 1; i < counts.size(); ++i) counts[i] += counts[i - 1];
    offsets_ = counts;
    order_.resize(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
      order_[static_cast<std::size_t>(counts[static_cast<std::size_t>(cell_of[i])]++)] = static_cast<int>(i);
    }
  }

  // Exact distance from z to the nearest indexed point.
  double nearest(Complex z) const {
    const int cx = std::clamp(static_cast<int>((z.real() - min_x_) / cell_), 0, nx_ - 1);
    const int cy = std::clamp(static_cast<int>((z.imag() - min_y_) / cell_), 0, ny_ - 1);
    double best = std::numeric_limits<double>::infinity();
    const int max_ring = std::max(nx_, ny_);
    for (int k = 0; k <= max_ring; ++k) {
      auto visit = [&](int ix, int iy) {
        if (ix < 0 || iy < 0 || ix >= nx_ || iy >= ny_) return;
        const auto cell = static_cast<std::size_t>(iy) * nx_ + ix;
        for (int i = offsets_[cell]; i < offsets_[cell + 1]; ++i) {
          best = std::min(best, std::abs(points_[static_cast<std::size_t>(order_[static_cast<std::size_t>(i)])] - z));
        }
      };
      if (k == 0) {
        visit(cx, cy);
      } else {
        for (int dx = -k; dx <= k; ++dx) {
          visit(cx + dx, cy - k);
          visit(cx + dx, cy + k);
        }
        for (int dy = -k + 1; dy <= k - 1; ++dy) {
          visit(cx - k, cy + dy);
          visit(cx + k, cy + dy);
        }
      }
      // Anything in ring k+1 or beyond is at least k cells away.
      if (best <= k * cell_ * (1.0 - 1e-12)) break;
    }
    return best;
  }

 private:
  int cell_index(Complex z) const {
    const int cx = std::clamp(static_cast<int>((z.real() - min_x_) / cell_), 0, nx_ - 1);
    const int cy = std::clamp(static_cast<int>((z.imag() - min_y_) / cell_), 0, ny_ - 1);
    return cy * nx_ + cx;
  }

  std::span<const Complex> points_;
  double min_x_;
  double min_y_;
  double cell_ = 1.0;
  int nx_ = 1;
  int ny_ = 1;
  std::vector<int> offsets_;
  std::vector<int> order_;
};

double directed_hausdorff(std::span<const Complex> from, const GridIndex& to, int threads) {
  const std::size_t n = from.size();
  const auto workers = static_cast<std::size_t>(std::max(1, std::min<int>(threads, static_cast<int>(n / 4096) + 1)));
  std::vector<double> partial(workers, 0.0);
  auto run = [&](std::size_t w) {
    double worst = 0.0;
    for (std::size_t i = w * n / workers; i < (w + 1) * n / workers; ++i) worst = std::max(worst, to.nearest(from[i]));
    partial[w] = worst;
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run, w);
  }
  return *std::max_element(partial.begin(), partial.end());
}

}  // namespace

double hausdorff_distance(const PointCloud& A, const PointCloud& B, const HausdorffOptions& options) {
  if (A.empty() || B.empty()) throw Error(ErrorCode::EmptyCloud, "Hausdorff distance of an empty cloud");
  double min_x = std::numeric_limits<double>::infinity();
  double min_y = min_x;
  double max_x = -min_x;
  double max_y = -min_x;
  for (const auto* cloud : {&A, &B}) {
    for (const Complex& z : cloud->points) {
      min_x = std::min(min_x, z.real());
      max_x = std::max(max_x, z.real());
      min_y = std::min(min_y, z.imag());
      max_y = std::max(max_y, z.imag());
    }
  }
  int threads = options.threads;
  if (threads <= 0) threads = std::max(1u, std::thread::hardware_concurrency());
  const GridIndex index_a(A.points, min_x, min_y, max_x, max_y);
  const GridIndex index_b(B.points, min_x, min_y, max_x, max_y);
  return std::max(directed_hausdorff(A.points, index_b, threads), directed_hausdorff(B.points, index_a, threads));
}

// ---------------------------------------------------------------------------
// Similarity curves

bool decreasing_trend(const SimilarityCurve& curve) {
  const auto& d = curve.distances;
  if (d.empty()) return false;
  for (std::size_t k = 0; k + 1 < d.size(); ++k) {
    if (d[k + 1] > d[k] + curve.pixel) return false;
  }
  return d.back() <= d.front() && d.back() <= 0.5 * d.front();
}

double default_similarity_radius(const MisiurewiczReport& report, Complex about) {
  const int l = report.preperiod;
  const int n = report.period;
  double nearest = std::numeric_limits<double>::infinity();
  for (int j = l; j < l + n; ++j) {
    const double d = std::abs(report.orbit.at(static_cast<std::size_t>(j)) - about);
    if (d > kClosureTolerance) nearest = std::min(nearest, d);
  }
  if (!std::isfinite(nearest)) {
    for (int j = 1; j < l; ++j) {
      const double d = std::abs(report.orbit.at(static_cast<std::size_t>(j)) - about);
      if (d > kClosureTolerance) nearest = std::min(nearest, d);
    }
  }
  if (!std::isfinite(nearest)) throw Error(ErrorCode::InvalidArgument, "orbit has no second point");
  return 0.5 * nearest / std::abs(report.multiplier);
}

namespace {

struct Level {
  PointCloud cloud;
  Complex factor;
};

double normalized_pitch(const Level& level) { return level.cloud.spacing * std::abs(level.factor); }

void check_resolution(const Level& level, double r) {
  const double pitch = normalized_pitch(level);
  if (!(level.cloud.spacing > 0.0) || pitch > r / 50.0 * (1.0 + 1e-12)) {
    throw Error(ErrorCode::ResolutionTooCoarse,
                "normalized pixel " + std::to_string(pitch) + " exceeds r/50 = " + std::to_string(r / 50.0));
  }
  if (level.cloud.empty()) throw Error(ErrorCode::EmptyCloud, "similarity level without points");
}

SimilarityCurve pairwise_curve(const std::vector<Level>& first, const std::vector<Level>& second,
                               Complex center, double r, int k_max, int offset, CurveMode mode,
                               double lambda_abs, const HausdorffOptions& options) {
  SimilarityCurve curve;
  curve.r = r;
  curve.mode = mode;
  for (const auto* levels : {&first, &second}) {
    for (const Level& level : *levels) {
      check_resolution(level, r);
      curve.pixel = std::max(curve.pixel, normalized_pitch(level));
    }
  }
  const int samples = default_circle_samples(r, curve.pixel);
  for (int k = 0; k < k_max; ++k) {
    const Level& x = first[static_cast<std::size_t>(k)];
    const Level& y = second[static_cast<std::size_t>(k + offset)];
    const PointCloud tx = truncate_normalize(x.cloud, center, x.factor, r, samples);
    const PointCloud ty = truncate_normalize(y.cloud, center, y.factor, r, samples);
    curve.scales.push_back(k);
    curve.scale_abs.push_back(std::pow(lambda_abs, k));
    curve.distances.push_back(hausdorff_distance(tx, ty, options));
  }
  return curve;
}

}  // namespace

SimilarityCurve self_similarity_curve(const CloudAtLevel& K_at_level, const MisiurewiczReport& report,
                                      Complex about, double r, int k_max, const HausdorffOptions& options) {
  if (k_max < 1) throw Error(ErrorCode::InvalidArgument, "k_max must be positive");
  std::vector<Level> levels;
  Complex factor{1.0, 0.0};
  for (int level = 0; level <= k_max; ++level) {
    levels.push_back(Level{K_at_level(level), factor});
    factor *= report.multiplier;
  }
  return pairwise_curve(levels, levels, about, r, k_max, 1, CurveMode::SelfSimilarity,
                        std::abs(report.multiplier), options);
}

SimilarityCurve self_similarity_curve(const PointCloud& K_cloud, const MisiurewiczReport& report, Complex about,
                                      double r, int k_max, const HausdorffOptions& options) {
  if (!(K_cloud.spacing > 0.0) ||
      K_cloud.spacing > r * std::pow(std::abs(report.multiplier), -k_max) / 50.0 * (1.0 + 1e-12)) {
    throw Error(ErrorCode::ResolutionTooCoarse, "cloud spacing exceeds r |lambda|^-k_max / 50");
  }
  return self_similarity_curve([&](int) { return K_cloud; }, report, about, r, k_max, options);
}

SimilarityCurve julia_vs_multibrot_curve(const CloudAtLevel& M_at_level, const CloudAtLevel& K_at_level,
                                         const MisiurewiczReport& report, double r, int k_max,
                                         const HausdorffOptions& options) {
  if (k_max < 1) throw Error(ErrorCode::InvalidArgument, "k_max must be positive");
  std::vector<Level> m_levels;
  std::vector<Level> k_levels;
  Complex factor{1.0, 0.0};
  for (int level = 0; level < k_max; ++level) {
    m_levels.push_back(Level{M_at_level(level), factor});
    k_levels.push_back(Level{K_at_level(level), report.mu * factor});
    factor *= report.multiplier;
  }
  return pairwise_curve(m_levels, k_levels, report.a, r, k_max, 0, CurveMode::JuliaVsMultibrot,
                        std::abs(report.multiplier), options);
}

SimilarityCurve julia_vs_multibrot_curve(const PointCloud& M_cloud, const PointCloud& K_cloud,
                                         const MisiurewiczReport& report, double r, int k_max,
                                         const HausdorffOptions& options) {
  const double lambda_abs = std::abs(report.multiplier);
  const double bound = r * std::pow(lambda_abs, -(k_max - 1)) / 50.0 * (1.0 + 1e-12);
  if (!(M_cloud.spacing > 0.0) || !(K_cloud.spacing > 0.0) || M_cloud.spacing > bound ||
      K_cloud.spacing * std::abs(report.mu) > bound) {
    throw Error(ErrorCode::ResolutionTooCoarse, "cloud spacing too coarse for the finest magnification");
  }
  return julia_vs_multibrot_curve([&](int) { return M_cloud; }, [&](int) { return K_cloud; }, report, r, k_max,
                                  options);
}

}  // namespace corrdyn
