#pragma once

// Koenigs linearization at the repelling cycle, limit models, truncated
// magnifications and Hausdorff-distance similarity curves.

#include <functional>
#include <vector>

#include "corrdyn/misiurewicz.hpp"
#include "corrdyn/raster.hpp"

namespace corrdyn {

// Maps a displacement from the fixed point to a displacement from the fixed point.
using LocalMap = std::function<Complex(Complex)>;

// Linearizer phi of the return map h at its repelling fixed point z_l:
//   phi(h(z)) = lambda phi(z),  phi(z_l) = 0,  phi'(z_l) = 1.
// phi is evaluated through the contracting inverse branch psi = h^-1:
//   phi(z) = lim lambda^m (psi^m(z) - z_l).
class KoenigsMap {
 public:
  KoenigsMap(Complex fixed_point, Complex multiplier, LocalMap forward, LocalMap inverse, double domain_radius);

  Complex fixed_point() const noexcept { return fixed_point_; }
  Complex multiplier() const noexcept { return multiplier_; }
  double domain_radius() const noexcept { return domain_radius_; }
  int n_limit() const noexcept { return n_limit_; }

  // Return map on the disk |z - z_l| <= domain_radius.
  Complex h(Complex z) const;
  // Defined on h's image of that disk, taken as |z - z_l| <= |lambda| domain_radius.
  Complex phi(Complex z) const;

 private:
  Complex fixed_point_;
  Complex multiplier_;
  LocalMap forward_;
  LocalMap inverse_;
  double domain_radius_;
  int n_limit_ = 64;
};

// Return map along the report's cycle, built from the univalent branches of
// the correspondence that carry each cycle point to the next.
KoenigsMap koenigs_build(const MisiurewiczReport& report, double domain_radius);

// {factor (a - center) : a in A} intersected with the closed disk of radius
// r, plus circle_samples equispaced points of the circle |w| = r.
PointCloud truncate_normalize(const PointCloud& A, Complex center, Complex factor, double r, int circle_samples);

int default_circle_samples(double r, double pixel);

struct HausdorffOptions {
  int threads = 0;
};

// Exact Hausdorff distance between finite clouds.  Throws EmptyCloud.
double hausdorff_distance(const PointCloud& A, const PointCloud& B, const HausdorffOptions& options = {});

enum class CurveMode { SelfSimilarity, JuliaVsMultibrot };

struct SimilarityCurve {
  std::vector<int> scales;         // k
  std::vector<double> scale_abs;   // |lambda|^k
  std::vector<double> distances;   // Hausdorff distance at k
  double r = 0.0;
  double pixel = 0.0;              // sampling pitch after normalization
  CurveMode mode = CurveMode::SelfSimilarity;
};

// distances[k+1] <= distances[k] + pixel for every k, and the curve actually
// shrinks: last <= first / 2.  A flat curve (wrong scaling constant) fails.
bool decreasing_trend(const SimilarityCurve& curve);

// 0.5 |lambda|^-1 times the distance from `about` to the nearest other cycle
// point (nearest other orbit point for a period-1 cycle through `about`).
double default_similarity_radius(const MisiurewiczReport& report, Complex about);

// Cloud covering the closed disk of radius r / |scale| about the relevant
// centre for magnification level k; rendered per level.
using CloudAtLevel = std::function<PointCloud(int level)>;

// Single-cloud form.  Requires spacing <= r |lambda|^-k_max / 50.
SimilarityCurve self_similarity_curve(const PointCloud& K_cloud, const MisiurewiczReport& report, Complex about,
                                      double r, int k_max, const HausdorffOptions& options = {});
// Per-level form: level k must satisfy spacing |lambda|^k <= r / 50.
SimilarityCurve self_similarity_curve(const CloudAtLevel& K_at_level, const MisiurewiczReport& report,
                                      Complex about, double r, int k_max, const HausdorffOptions& options = {});

SimilarityCurve julia_vs_multibrot_curve(const PointCloud& M_cloud, const PointCloud& K_cloud,
                                         const MisiurewiczReport& report, double r, int k_max,
                                         const HausdorffOptions& options = {});
// M level k covers r / |lambda|^k about a, K level k covers r / |mu lambda^k| about a.
SimilarityCurve julia_vs_multibrot_curve(const CloudAtLevel& M_at_level, const CloudAtLevel& K_at_level,
                                         const MisiurewiczReport& report, double r, int k_max,
                                         const HausdorffOptions& options = {});

// B_l = phi(K_cloud); the following entries multiply the previous one by each
// derivative in turn.  Throws DivergedFromDomain if a point is outside phi's domain.
std::vector<PointCloud> limit_model(const PointCloud& K_cloud, const KoenigsMap& koenigs,
                                    std::span<const Complex> pushforward_derivs);

// Accurate complex log(1 + z) and exp(z) - 1 for small |z|.
Complex log1p(Complex z);
Complex expm1(Complex z);

}  // namespace corrdyn
