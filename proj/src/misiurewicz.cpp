#include "corrdyn/misiurewicz.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace corrdyn {

namespace {

constexpr double kMinimalityTolerance = 1e-9;
constexpr double kNewtonResidual = 1e-13;
constexpr double kNewtonStep = 1e-14;

bool finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

std::string fmt_complex(Complex z) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%.12g%+.12gi", z.real(), z.imag());
  return buf;
}

EscapeConfig config_at(const Exponent& exp, Complex c, const EscapeConfig& proto, int depth) {
  EscapeConfig cfg = proto;
  cfg.radius = escape_radius(exp, std::abs(c), proto.lambda_esc, proto.margin);
  if (!(cfg.merge_eps < cfg.radius / 1e4)) cfg.merge_eps = cfg.radius * 1e-9;
  cfg.max_iter = depth;
  return cfg;
}

// All F_j and F_j' for j = 1..count.
std::vector<PolyValue> f_poly_table(Complex c, const SignSequence& s, int count) {
  std::vector<PolyValue> table;
  table.reserve(static_cast<std::size_t>(count));
  PolyValue f{c, Complex{1.0, 0.0}};
  table.push_back(f);
  for (int j = 1; j < count; ++j) {
    const double sigma = s.sign(j);
    f = PolyValue{sigma * f.value * f.value + c, 2.0 * sigma * f.value * f.derivative + 1.0};
    table.push_back(f);
  }
  return table;
}

void require_residual(Complex a, const SignSequence& s) {
  s.validate();
  const int top = s.preperiod + s.period;
  const double residual = std::abs(f_poly_eval(a, s, top).value - f_poly_eval(a, s, s.preperiod).value);
  if (!(residual <= kMisiurewiczResidual)) {
    throw Error(ErrorCode::ResidualTooLarge,
                "|F_{l+n}(a) - F_l(a)| = " + std::to_string(residual) + " at a = " + fmt_complex(a));
  }
}


// Membership depth at which rounding error in the orbit, amplified by the
// branch derivatives (the cycle repeated as needed), stays well below the
// escape radius.  Clamped to [top + 2, cap].
int survivor_depth(const std::vector<Complex>& orbit, Complex c, const Exponent& exp, int preperiod, int period,
                   int cap) {
  const int top = preperiod + period;
  auto at = [&](int j) { return orbit[static_cast<std::size_t>(j <= top ? j : preperiod + (j - preperiod) % period)]; };
  const double budget = std::log(1e11);
  double log_gain = 0.0;
  int depth = 1;
  while (depth < cap) {
    const Complex z = at(depth);
    if (z == Complex{}) break;
    log_gain += std::log(std::max(std::abs(branch_derivative(z, at(depth + 1), c, exp)), 1e-300));
    if (log_gain > budget) break;
    ++depth;
  }
  return std::clamp(depth, std::min(top + 2, cap), cap);
}

}  // namespace

void SignSequence::validate() const {
  if (preperiod < 2) throw Error(ErrorCode::InvalidArgument, "sign sequences need preperiod >= 2");
  if (period < 1) throw Error(ErrorCode::InvalidArgument, "period must be positive");
  if (static_cast<int>(signs.size()) != preperiod + period - 1) {
    throw Error(ErrorCode::InvalidArgument, "sign sequence length must equal preperiod + period - 1");
  }
  for (int s : signs) {
    if (s != 1 && s != -1) throw Error(ErrorCode::InvalidArgument, "signs must be +1 or -1");
  }
}

SignSequence SignSequence::parse(const std::string& text, int preperiod, int period) {
  SignSequence s;
  s.preperiod = preperiod;
  s.period = period;
  for (char ch : text) {
    if (ch == '+') {
      s.signs.push_back(1);
    } else if (ch == '-') {
      s.signs.push_back(-1);
    } else {
      throw Error(ErrorCode::InvalidArgument, std::string("invalid sign character '") + ch + "'");
    }
  }
  s.validate();
  return s;
}

std::string SignSequence::str() const {
  std::string out;
  for (int s : signs) out.push_back(s > 0 ? '+' : '-');
  return out;
}

PolyValue f_poly_eval(Complex c, const SignSequence& s, int j) {
  if (j < 1 || j > s.preperiod + s.period) {
    throw Error(ErrorCode::InvalidArgument, "F_j index out of range");
  }
  return f_poly_table(c, s, j).back();
}

Complex transversality_42(Complex a, const SignSequence& s) {
  require_residual(a, s);
  return f_poly_eval(a, s, s.preperiod + s.period).derivative - f_poly_eval(a, s, s.preperiod).derivative;
}

Complex multiplier_42(Complex a, const SignSequence& s) {
  require_residual(a, s);
  const auto table = f_poly_table(a, s, s.preperiod + s.period);
  Complex lambda{1.0, 0.0};
  for (int j = s.preperiod; j < s.preperiod + s.period; ++j) {
    lambda *= 2.0 * s.sign(j) * table[static_cast<std::size_t>(j - 1)].value;
  }
  if (!(std::abs(lambda) > 1.0)) {
    throw Error(ErrorCode::NotRepelling, "|lambda| = " + std::to_string(std::abs(lambda)) + " <= 1");
  }
  return lambda;
}

MuTerms mu_constant_42(Complex a, const SignSequence& s) {
  const Complex lambda = multiplier_42(a, s);
  const Complex w_prime = transversality_42(a, s);
  const auto table = f_poly_table(a, s, s.preperiod);
  MuTerms terms;
  terms.g_prime = Complex{1.0, 0.0};
  for (int j = 1; j < s.preperiod; ++j) {
    terms.g_prime *= 2.0 * s.sign(j) * table[static_cast<std::size_t>(j - 1)].value;
  }
  terms.u_prime = w_prime / (lambda - 1.0);
  terms.mu = terms.g_prime / terms.u_prime;
  return terms;
}

std::optional<SignSequence> signs_from_orbit(std::span<const Complex> orbit, Complex c, int preperiod,
                                             int period) {
  const int length = preperiod + period - 1;
  if (static_cast<int>(orbit.size()) < length + 2) return std::nullopt;
  SignSequence s;
  s.preperiod = preperiod;
  s.period = period;
  for (int j = 1; j <= length; ++j) {
    const Complex sq = orbit[static_cast<std::size_t>(j)] * orbit[static_cast<std::size_t>(j)];
    const Complex step = orbit[static_cast<std::size_t>(j + 1)] - c;
    const double tol = 1e-6 * std::max(1.0, std::abs(sq));
    if (std::abs(step - sq) <= tol) {
      s.signs.push_back(1);
    } else if (std::abs(step + sq) <= tol) {
      s.signs.push_back(-1);
    } else {
      return std::nullopt;
    }
  }
  return s;
}

MisiurewiczReport solve_misiurewicz_42(const SignSequence& s, Complex c0, const SolveOptions& options) {
  s.validate();
  const int l = s.preperiod;
  const int n = s.period;
  const int top = l + n;

  auto w_at = [&](Complex c) {
    const PolyValue hi = f_poly_eval(c, s, top);
    const PolyValue lo = f_poly_eval(c, s, l);
    return PolyValue{hi.value - lo.value, hi.derivative - lo.derivative};
  };

  Complex c = c0;
  bool converged = false;
  for (int it = 0; it < options.newton_iterations; ++it) {
    const PolyValue w = w_at(c);
    if (!finite(w.value) || !finite(w.derivative)) break;
    if (std::abs(w.value) <= kNewtonResidual) {
      // one polishing step, kept only if it does not worsen the residual
      if (w.derivative != Complex{}) {
        const Complex polished = c - w.value / w.derivative;
        if (std::abs(w_at(polished).value) <= std::abs(w.value)) c = polished;
      }
      converged = true;
      break;
    }
    if (w.derivative == Complex{}) break;
    const Complex step = w.value / w.derivative;
    c -= step;
    if (!finite(c)) break;
    if (std::abs(step) <= kNewtonStep) {
      converged = true;
      break;
    }
  }
  const double residual = converged ? std::abs(w_at(c).value) : std::numeric_limits<double>::infinity();
  if (!converged || !(residual <= kMisiurewiczResidual)) {
    throw Error(ErrorCode::NoConvergence, "Newton on F_{l+n} - F_l from " + fmt_complex(c0) + " (pattern " +
                                              s.str() + ")");
  }
  const Complex a = c;
  const auto table = f_poly_table(a, s, top);
  auto F = [&](int j) { return table[static_cast<std::size_t>(j - 1)].value; };

  // (i) minimal preperiod
  for (int lp = 2; lp < l; ++lp) {
    if (std::abs(F(lp + n) - F(lp)) <= kMinimalityTolerance) {
      throw Error(ErrorCode::NotMinimal, "preperiod " + std::to_string(lp) + " already closes at " + fmt_complex(a));
    }
  }
  // (ii) minimal period
  for (int d = 1; d < n; ++d) {
    if (n % d == 0 && std::abs(F(l + d) - F(l)) <= kMinimalityTolerance) {
      throw Error(ErrorCode::NotMinimal, "period " + std::to_string(d) + " already closes at " + fmt_complex(a));
    }
  }
  // (iii) the critical point never returns and F_{l-1+n} - F_{l-1} != 0
  for (int j = 1; j <= top; ++j) {
    if (std::abs(F(j)) <= kMinimalityTolerance) {
      throw Error(ErrorCode::NotStrictlyPreperiodic, "critical orbit is periodic at " + fmt_complex(a));
    }
  }
  const Complex before = l - 1 >= 1 ? F(l - 1) : Complex{};
  if (std::abs(F(l - 1 + n) - before) <= kMinimalityTolerance) {
    throw Error(ErrorCode::NotStrictlyPreperiodic, "z_1 lies on the cycle at " + fmt_complex(a));
  }
  // (iv) the engine must find exactly this orbit as the unique bounded one
  const Exponent exp42{4, 2};
  std::vector<Complex> points{Complex{}};
  for (int j = 1; j <= top; ++j) points.push_back(F(j));
  const int depth = survivor_depth(points, a, exp42, l, n, options.engine_depth);
  const EscapeConfig cfg = config_at(exp42, a, make_escape_config(exp42, std::abs(a)), depth);
  std::optional<BoundedOrbit> orbit;
  try {
    orbit = unique_bounded_orbit(Complex{}, a, exp42, cfg, top + 4);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NoClosure) throw;
  }
  if (!orbit) {
    throw Error(ErrorCode::UniquenessFailed, "critical orbit is not the unique bounded orbit at " + fmt_complex(a));
  }
  if (orbit->preperiod != l || orbit->period != n) {
    throw Error(ErrorCode::SignPatternMismatch,
                "engine found preperiod " + std::to_string(orbit->preperiod) + ", period " +
                    std::to_string(orbit->period) + " at " + fmt_complex(a));
  }
  const auto engine_signs = signs_from_orbit(orbit->points, a, l, n);
  if (!engine_signs || engine_signs->signs != s.signs) {
    throw Error(ErrorCode::SignPatternMismatch, "engine orbit follows " +
                                                    (engine_signs ? engine_signs->str() : std::string("?")) +
                                                    ", requested " + s.str());
  }

  MisiurewiczReport report;
  report.a = a;
  report.exponent = exp42;
  report.preperiod = l;
  report.period = n;
  report.signs = s;
  report.orbit.push_back(Complex{});
  for (int j = 1; j <= top; ++j) report.orbit.push_back(F(j));
  report.residual = residual;
  report.multiplier = multiplier_42(a, s);
  report.w_prime = transversality_42(a, s);
  if (!(std::abs(report.w_prime) >= kTransversalityFloor)) {
    throw Error(ErrorCode::TransversalityViolation,
                "|w'(a)| = " + std::to_string(std::abs(report.w_prime)) + " at " + fmt_complex(a));
  }
  const MuTerms mu = mu_constant_42(a, s);
  report.g_prime = mu.g_prime;
  report.u_prime = mu.u_prime;
  report.mu = mu.mu;
  return report;
}

std::optional<MisiurewiczReport> search_sign_patterns_42(int preperiod, int period, Complex c0,
                                                         const SolveOptions& options) {
  const int length = preperiod + period - 1;
  if (preperiod < 2 || period < 1 || length > 24) {
    throw Error(ErrorCode::InvalidArgument, "sign-pattern search needs preperiod >= 2, period >= 1, length <= 24");
  }
  std::optional<MisiurewiczReport> best;
  for (std::uint32_t bits = 0; bits < (1u << length); ++bits) {
    SignSequence s;
    s.preperiod = preperiod;
    s.period = period;
    for (int j = 0; j < length; ++j) s.signs.push_back((bits >> j) & 1u ? -1 : 1);
    try {
      MisiurewiczReport r = solve_misiurewicz_42(s, c0, options);
      if (!best || std::abs(r.a - c0) < std::abs(best->a - c0)) best = std::move(r);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::TransversalityViolation) throw;
    }
  }
  return best;
}

std::vector<Complex> survivor_orbit(Complex c, const Exponent& exp, const EscapeConfig& cfg, int length) {
  std::vector<Complex> orbit{Complex{}};
  OrbitWorkspace ws;
  std::vector<Complex> images;
  for (int j = 0; j < length; ++j) {
    images.clear();
    append_forward_images(orbit.back(), c, exp, images);
    int best = 0;
    int best_score = -1;
    for (int k = 0; k < static_cast<int>(images.size()); ++k) {
      const MembershipVerdict v = in_filled_julia(images[k], c, exp, cfg, ws);
      const int score = v.inside() ? cfg.max_iter + 1 : v.steps;
      if (score > best_score) {
        best_score = score;
        best = k;
      }
    }
    orbit.push_back(images[static_cast<std::size_t>(best)]);
  }
  return orbit;
}

TrackedOrbit track_orbit(Complex c, const Exponent& exp, std::span<const Complex> reference, double merge_eps) {
  TrackedOrbit t;
  t.points.reserve(reference.size());
  t.derivatives.reserve(reference.size());
  t.points.push_back(Complex{});
  t.derivatives.push_back(Complex{});
  if (reference.size() < 2) return t;
  t.points.push_back(c);
  t.derivatives.push_back(Complex{1.0, 0.0});
  std::vector<Complex> images;
  for (std::size_t j = 2; j < reference.size(); ++j) {
    const Complex z = t.points.back();
    if (z == Complex{}) throw Error(ErrorCode::BranchJump, "orbit hit the branch point");
    images.clear();
    append_forward_images(z, c, exp, images);
    std::size_t best = 0;
    double d1 = std::numeric_limits<double>::infinity();
    double d2 = d1;
    for (std::size_t k = 0; k < images.size(); ++k) {
      const double d = std::abs(images[k] - reference[j]);
      if (d < d1) {
        d2 = d1;
        d1 = d;
        best = k;
      } else if (d < d2) {
        d2 = d;
      }
    }
    if (d2 - d1 <= 10.0 * merge_eps) {
      throw Error(ErrorCode::BranchJump, "ambiguous continuation at step " + std::to_string(j));
    }
    const Complex w = images[best];
    t.derivatives.push_back(branch_derivative(z, w, c, exp) * t.derivatives.back() + 1.0);
    t.points.push_back(w);
  }
  return t;
}

MisiurewiczReport refine_misiurewicz_numeric(const Exponent& exp, Complex c0, int preperiod, int period,
                                             const EscapeConfig& cfg, const SolveOptions& options) {
  if (preperiod < 2 || period < 1) {
    throw Error(ErrorCode::InvalidArgument, "refinement needs preperiod >= 2 and period >= 1");
  }
  const int top = preperiod + period;
  const EscapeConfig cfg0 = config_at(exp, c0, cfg, options.engine_depth);
  std::vector<Complex> reference = survivor_orbit(c0, exp, cfg0, top);

  Complex c = c0;
  bool converged = false;
  TrackedOrbit orbit;
  for (int it = 0; it < options.newton_iterations; ++it) {
    orbit = track_orbit(c, exp, reference, cfg0.merge_eps);
    const Complex w = orbit.points[static_cast<std::size_t>(top)] - orbit.points[static_cast<std::size_t>(preperiod)];
    const Complex dw =
        orbit.derivatives[static_cast<std::size_t>(top)] - orbit.derivatives[static_cast<std::size_t>(preperiod)];
    if (!finite(w) || !finite(dw)) break;
    reference = orbit.points;
    if (std::abs(w) <= kNewtonResidual) {
      converged = true;
      break;
    }
    if (dw == Complex{}) break;
    const Complex step = w / dw;
    c -= step;
    if (!finite(c)) break;
    if (std::abs(step) <= kNewtonStep * std::max(1.0, std::abs(c))) {
      orbit = track_orbit(c, exp, reference, cfg0.merge_eps);
      converged = true;
      break;
    }
  }
  const Complex a = c;
  const double residual =
      converged ? std::abs(orbit.points[static_cast<std::size_t>(top)] - orbit.points[static_cast<std::size_t>(preperiod)])
                : std::numeric_limits<double>::infinity();
  if (!converged || !(residual <= kMisiurewiczResidual)) {
    throw Error(ErrorCode::NoConvergence, "orbit-closure Newton from " + fmt_complex(c0));
  }

  const int depth = survivor_depth(orbit.points, a, exp, preperiod, period, options.engine_depth);
  const EscapeConfig cfg_a = config_at(exp, a, cfg, depth);
  std::optional<BoundedOrbit> engine;
  try {
    engine = unique_bounded_orbit(Complex{}, a, exp, cfg_a, top + 4);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NoClosure) throw;
  }
  if (!engine) {
    throw Error(ErrorCode::UniquenessFailed, "critical orbit is not the unique bounded orbit at " + fmt_complex(a));
  }
  if (engine->preperiod < 2) {
    throw Error(ErrorCode::NotStrictlyPreperiodic, "critical orbit returns onto z_1 at " + fmt_complex(a));
  }
  if (engine->preperiod + engine->period < top && engine->preperiod <= preperiod && engine->period <= period) {
    throw Error(ErrorCode::NotMinimal, "orbit already closes with preperiod " + std::to_string(engine->preperiod) +
                                           ", period " + std::to_string(engine->period));
  }
  if (engine->preperiod != preperiod || engine->period != period) {
    throw Error(ErrorCode::UniquenessFailed, "engine orbit has preperiod " + std::to_string(engine->preperiod) +
                                                 ", period " + std::to_string(engine->period));
  }
  for (int j = 0; j <= top; ++j) {
    const auto idx = static_cast<std::size_t>(j);
    if (std::abs(engine->points[idx] - orbit.points[idx]) > 1e-6 * std::max(1.0, std::abs(orbit.points[idx]))) {
      throw Error(ErrorCode::UniquenessFailed, "tracked orbit leaves the bounded orbit at step " + std::to_string(j));
    }
  }

  MisiurewiczReport report;
  report.a = a;
  report.exponent = exp;
  report.preperiod = preperiod;
  report.period = period;
  report.orbit = orbit.points;
  report.residual = residual;
  if (exp == Exponent{4, 2}) report.signs = signs_from_orbit(report.orbit, a, preperiod, period);

  auto branch_product = [&](int from, int to) {
    Complex prod{1.0, 0.0};
    for (int j = from; j < to; ++j) {
      const auto idx = static_cast<std::size_t>(j);
      prod *= branch_derivative(report.orbit[idx], report.orbit[idx + 1], a, exp);
    }
    return prod;
  };
  report.multiplier = branch_product(preperiod, top);
  if (!(std::abs(report.multiplier) > 1.0)) {
    throw Error(ErrorCode::NotRepelling, "|lambda| = " + std::to_string(std::abs(report.multiplier)));
  }
  report.w_prime = orbit.derivatives[static_cast<std::size_t>(top)] - orbit.derivatives[static_cast<std::size_t>(preperiod)];
  report.g_prime = branch_product(1, preperiod);
  report.u_prime = report.w_prime / (report.multiplier - 1.0);
  report.mu = report.g_prime / report.u_prime;
  return report;
}

MisiurewiczReport refine_misiurewicz_auto(const Exponent& exp, Complex c0, const EscapeConfig& cfg,
                                          int max_preperiod, int max_period, const SolveOptions& options) {
  std::string last_error = "no (preperiod, period) pair tried";
  for (int total = 3; total <= max_preperiod + max_period; ++total) {
    for (int pre = 2; pre <= std::min(max_preperiod, total - 1); ++pre) {
      const int per = total - pre;
      if (per > max_period) continue;
      try {
        return refine_misiurewicz_numeric(exp, c0, pre, per, cfg, options);
      } catch (const Error& e) {
        last_error = e.what();
      }
    }
  }
  throw Error(ErrorCode::NoConvergence, "no Misiurewicz pattern found near " + fmt_complex(c0) + " (last: " +
                                            last_error + ")");
}

}  // namespace corrdyn
