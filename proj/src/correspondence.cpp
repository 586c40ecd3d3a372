#include "corrdyn/correspondence.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace corrdyn {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::BranchPoint: return "BranchPoint";
    case ErrorCode::NoSignChange: return "NoSignChange";
    case ErrorCode::NoClosure: return "NoClosure";
    case ErrorCode::EmptyCloud: return "EmptyCloud";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::NotMinimal: return "NotMinimal";
    case ErrorCode::NotStrictlyPreperiodic: return "NotStrictlyPreperiodic";
    case ErrorCode::UniquenessFailed: return "UniquenessFailed";
    case ErrorCode::SignPatternMismatch: return "SignPatternMismatch";
    case ErrorCode::ResidualTooLarge: return "ResidualTooLarge";
    case ErrorCode::NotRepelling: return "NotRepelling";
    case ErrorCode::TransversalityViolation: return "TransversalityViolation";
    case ErrorCode::BranchJump: return "BranchJump";
    case ErrorCode::DivergedFromDomain: return "DivergedFromDomain";
    case ErrorCode::ResolutionTooCoarse: return "ResolutionTooCoarse";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

Exponent::Exponent(int p, int q) : p_(p), q_(q) {
  if (q < 1 || p <= q || p > kMaxExponent || q > kMaxExponent) {
    throw Error(ErrorCode::InvalidArgument,
                "exponent requires p > q >= 1 and p, q <= 64 (got p=" + std::to_string(p) +
                    ", q=" + std::to_string(q) + ")");
  }
}

void EscapeConfig::validate() const {
  if (!(lambda_esc > 1.0)) throw Error(ErrorCode::InvalidArgument, "lambda_esc must exceed 1");
  if (!(radius > 0.0) || !std::isfinite(radius))
    throw Error(ErrorCode::InvalidArgument, "escape radius must be positive and finite");
  if (max_iter < 1) throw Error(ErrorCode::InvalidArgument, "max_iter must be positive");
  if (!(merge_eps >= 0.0) || !(merge_eps < radius / 1e4))
    throw Error(ErrorCode::InvalidArgument, "merge_eps must lie in [0, radius/1e4)");
  if (branch_cap < 1) throw Error(ErrorCode::InvalidArgument, "branch_cap must be positive");
  if (!(margin >= 0.0)) throw Error(ErrorCode::InvalidArgument, "margin must be nonnegative");
}

EscapeConfig make_escape_config(const Exponent& exp, double c_bound, int max_iter,
                                double lambda_esc, double margin) {
  EscapeConfig cfg;
  cfg.lambda_esc = lambda_esc;
  cfg.margin = margin;
  cfg.max_iter = max_iter;
  cfg.radius = escape_radius(exp, c_bound, lambda_esc, margin);
  cfg.merge_eps = cfg.radius * 1e-9;
  cfg.validate();
  return cfg;
}

Complex ipow(Complex z, int n) {
  Complex result{1.0, 0.0};
  Complex base = z;
  while (n > 0) {
    if (n & 1) result *= base;
    n >>= 1;
    if (n) base *= base;
  }
  return result;
}

Complex root_of_unity(int q, int k) {
  k %= q;
  if (k == 0) return {1.0, 0.0};
  if (2 * k == q) return {-1.0, 0.0};
  if (4 * k == q) return {0.0, 1.0};
  if (4 * k == 3 * q) return {0.0, -1.0};
  return std::polar(1.0, 2.0 * std::numbers::pi * k / q);
}

namespace {

double principal_arg(Complex z) {
  double theta = std::arg(z);
  return theta == -std::numbers::pi ? std::numbers::pi : theta;
}

}  // namespace

void append_forward_images(Complex z, Complex c, const Exponent& exp, std::vector<Complex>& out) {
  if (z == Complex{}) {
    out.push_back(c);
    return;
  }
  const int q = exp.q();
  if (exp.integral()) {
    const Complex zm = ipow(z, exp.p() / q);
    for (int k = 0; k < q; ++k) out.push_back(c + zm * root_of_unity(q, k));
    return;
  }
  const double rho = std::pow(std::abs(z), exp.ratio());
  const double base = exp.p() * principal_arg(z);
  for (int k = 0; k < q; ++k) {
    out.push_back(c + std::polar(rho, (base + 2.0 * std::numbers::pi * k) / q));
  }
}

std::vector<Complex> forward_images(Complex z, Complex c, const Exponent& exp) {
  std::vector<Complex> out;
  out.reserve(static_cast<std::size_t>(exp.q()));
  append_forward_images(z, c, exp, out);
  return out;
}

Complex branch_derivative(Complex z, Complex w, Complex c, const Exponent& exp) {
  if (z == Complex{}) {
    throw Error(ErrorCode::BranchPoint, "no univalent branch at the critical point z = 0");
  }
  const int p = exp.p();
  const int q = exp.q();
  return static_cast<double>(p) * ipow(z, p - 1) / (static_cast<double>(q) * ipow(w - c, q - 1));
}

double escape_radius(const Exponent& exp, double c_bound, double lambda_esc, double margin) {
  if (!(c_bound >= 0.0) || !std::isfinite(c_bound))
    throw Error(ErrorCode::InvalidArgument, "c_bound must be finite and nonnegative");
  if (!(lambda_esc > 1.0)) throw Error(ErrorCode::InvalidArgument, "lambda_esc must exceed 1");
  if (!(margin >= 0.0)) throw Error(ErrorCode::InvalidArgument, "margin must be nonnegative");

  const double r = exp.ratio();
  auto g = [&](double x) { return std::pow(x, r) - lambda_esc * x - c_bound; };

  // g < 0 strictly between the positive roots and > 0 beyond x0.
  double lo = std::max(1.0, c_bound);
  double hi = lo;
  if (g(lo) >= 0.0) {
    // x0 <= lo; walk the lower end down instead (g(0+) = -c_bound <= 0).
    int halvings = 0;
    while (g(lo) >= 0.0) {
      hi = lo;
      lo *= 0.5;
      if (++halvings > 1024) throw Error(ErrorCode::NoSignChange, "escape radius bracket");
    }
  } else {
    int doublings = 0;
    hi = 2.0 * lo;
    while (g(hi) <= 0.0) {
      lo = hi;
      hi *= 2.0;
      if (++doublings > 1024 || !std::isfinite(hi))
        throw Error(ErrorCode::NoSignChange, "no sign change within 2^10 doublings");
    }
  }
  while (hi - lo > 1e-12 * hi) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (g(mid) > 0.0 ? hi : lo) = mid;
  }
  return hi * (1.0 + margin);
}

BranchChoice branch_nearest(Complex z, Complex c, const Exponent& exp, Complex target) {
  if (z == Complex{}) {
    throw Error(ErrorCode::BranchPoint, "branch selection is undefined at z = 0");
  }
  std::vector<Complex> images;
  images.reserve(static_cast<std::size_t>(exp.q()));
  append_forward_images(z, c, exp, images);
  BranchChoice best{images[0], 0};
  double best_dist = std::abs(images[0] - target);
  for (int k = 1; k < static_cast<int>(images.size()); ++k) {
    const double d = std::abs(images[k] - target);
    if (d < best_dist) {
      best_dist = d;
      best = {images[k], k};
    }
  }
  return best;
}

}  // namespace corrdyn
