#include "corrdyn/pipeline.hpp"

#include <algorithm>
#include <cmath>

namespace corrdyn {

int similarity_base_depth(const MisiurewiczReport& report, double r, int pixels) {
  const double lambda_abs = std::abs(report.multiplier);
  if (!(lambda_abs > 1.0) || !(r > 0.0) || pixels < 2) {
    throw Error(ErrorCode::InvalidArgument, "base depth needs |lambda| > 1, r > 0 and at least 2 pixels");
  }
  const double radius = make_escape_config(report.exponent, std::abs(report.a)).radius;
  const double pixel = 2.0 * r / pixels;
  const double steps = report.period * std::log(radius / pixel) / std::log(lambda_abs);
  return std::clamp(static_cast<int>(std::ceil(steps)), 2, 4000);
}

SimilarityResult run_similarity(const SimilarityJob& job) {
  if (job.k_max < 1) throw Error(ErrorCode::InvalidArgument, "k_max must be positive");
  MisiurewiczReport report = job.report;
  if (job.mu_override) report.mu = *job.mu_override;
  if (report.mu == Complex{}) throw Error(ErrorCode::InvalidArgument, "mu must be nonzero");

  SimilarityResult result;
  result.r = job.r > 0.0 ? job.r : default_similarity_radius(report, report.a);
  result.base_depth = job.base_depth > 0 ? job.base_depth : similarity_base_depth(report, result.r, job.pixels);
  result.mu = report.mu;

  const Exponent& exp = report.exponent;
  const Complex a = report.a;
  const double lambda_abs = std::abs(report.multiplier);
  const double r = result.r;
  const int base = result.base_depth;

  auto julia_cloud = [&](double scale, int level) {
    const Window win = Window::covering_disk(a, r / scale, job.pixels);
    const EscapeConfig cfg = make_escape_config(exp, std::abs(a), base + level * report.period);
    return extract_point_cloud(render_julia(a, exp, win, cfg, job.render), win, CloudMode::Boundary);
  };
  auto multibrot_cloud = [&](double scale, int level) {
    const Window win = Window::covering_disk(a, r / scale, job.pixels);
    const EscapeConfig cfg = make_escape_config(exp, std::abs(a), base + 1 + level * report.period);
    return extract_point_cloud(render_multibrot(exp, win, cfg, job.render), win, CloudMode::Boundary);
  };

  result.self_curve = self_similarity_curve(
      [&](int k) { return julia_cloud(std::pow(lambda_abs, k), k); }, report, a, r, job.k_max, job.hausdorff);
  result.julia_vs_multibrot = julia_vs_multibrot_curve(
      [&](int k) { return multibrot_cloud(std::pow(lambda_abs, k), k); },
      [&](int k) { return julia_cloud(std::abs(report.mu) * std::pow(lambda_abs, k), k); }, report, r, job.k_max,
      job.hausdorff);
  return result;
}

}  // namespace corrdyn
