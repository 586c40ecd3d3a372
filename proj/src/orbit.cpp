#include "corrdyn/orbit.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace corrdyn {

namespace {

bool lex_less(const Complex& a, const Complex& b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

// Images of every point in `from` that stay inside the closed escape disk.
void push_live_images(std::span<const Complex> from, Complex c, const Exponent& exp,
                      double radius_sq, std::vector<Complex>& to) {
  to.clear();
  for (const Complex& z : from) {
    const std::size_t first = to.size();
    append_forward_images(z, c, exp, to);
    // Compact in place, dropping escaped images.
    std::size_t keep = first;
    for (std::size_t i = first; i < to.size(); ++i) {
      if (std::norm(to[i]) <= radius_sq) to[keep++] = to[i];
    }
    to.resize(keep);
  }
}

}  // namespace

namespace detail {

bool canonicalize(std::vector<Complex>& points, double eps, int cap, std::vector<Complex>& scratch) {
  if (points.size() > 1) {
    std::sort(points.begin(), points.end(), lex_less);
    scratch.clear();
    const double eps_sq = eps * eps;
    for (const Complex& z : points) {
      bool duplicate = false;
      for (auto it = scratch.rbegin(); it != scratch.rend() && it->real() >= z.real() - eps; ++it) {
        if (std::norm(*it - z) <= eps_sq) {
          duplicate = true;
          break;
        }
      }
      if (!duplicate) scratch.push_back(z);
    }
    points.swap(scratch);
  }
  if (points.size() <= static_cast<std::size_t>(cap)) return false;

  auto by_modulus = [](const Complex& a, const Complex& b) {
    const double na = std::norm(a);
    const double nb = std::norm(b);
    if (na != nb) return na < nb;
    return lex_less(a, b);
  };
  std::nth_element(points.begin(), points.begin() + cap, points.end(), by_modulus);
  points.resize(static_cast<std::size_t>(cap));
  std::sort(points.begin(), points.end(), lex_less);
  return true;
}

}  // namespace detail

OrbitSet iterate_set(const OrbitSet& set, Complex c, const Exponent& exp, const EscapeConfig& cfg) {
  OrbitSet out;
  out.depth = set.depth + 1;
  std::vector<Complex> scratch;
  push_live_images(set.points, c, exp, cfg.radius * cfg.radius, out.points);
  const bool cut = detail::canonicalize(out.points, cfg.merge_eps, cfg.branch_cap, scratch);
  out.truncated = set.truncated || cut;
  return out;
}

MembershipVerdict in_filled_julia(Complex z, Complex c, const Exponent& exp,
                                  const EscapeConfig& cfg, OrbitWorkspace& ws) {
  const double radius_sq = cfg.radius * cfg.radius;
  MembershipVerdict verdict;
  if (std::norm(z) > radius_sq) {
    verdict.status = Membership::Escaped;
    verdict.steps = 0;
    return verdict;
  }
  ws.current.assign(1, z);
  for (int step = 1; step <= cfg.max_iter; ++step) {
    push_live_images(ws.current, c, exp, radius_sq, ws.next);
    if (ws.next.empty()) {
      verdict.status = Membership::Escaped;
      verdict.steps = step;
      return verdict;
    }
    if (detail::canonicalize(ws.next, cfg.merge_eps, cfg.branch_cap, ws.scratch)) {
      verdict.truncated = true;
    }
    ws.current.swap(ws.next);
  }
  verdict.status = Membership::Inside;
  verdict.steps = cfg.max_iter;
  return verdict;
}

MembershipVerdict in_filled_julia(Complex z, Complex c, const Exponent& exp,
                                  const EscapeConfig& cfg) {
  OrbitWorkspace ws;
  return in_filled_julia(z, c, exp, cfg, ws);
}

std::optional<BoundedOrbit> unique_bounded_orbit(Complex z, Complex c, const Exponent& exp,
                                                 const EscapeConfig& cfg, int horizon) {
  OrbitWorkspace ws;
  if (!in_filled_julia(z, c, exp, cfg, ws).inside()) return std::nullopt;

  BoundedOrbit orbit;
  orbit.points.push_back(z);
  std::vector<Complex> images;
  for (int j = 0; j < horizon; ++j) {
    images.clear();
    append_forward_images(orbit.points.back(), c, exp, images);
    int survivor = -1;
    int survivors = 0;
    for (int k = 0; k < static_cast<int>(images.size()); ++k) {
      if (in_filled_julia(images[k], c, exp, cfg, ws).inside()) {
        survivor = k;
        ++survivors;
      }
    }
    if (survivors != 1) return std::nullopt;

    const Complex next = images[survivor];
    orbit.branches.push_back(survivor);
    orbit.points.push_back(next);
    const int last = static_cast<int>(orbit.points.size()) - 1;
    for (int i = 0; i < last; ++i) {
      if (std::abs(next - orbit.points[i]) <= kClosureTolerance) {
        orbit.preperiod = i;
        orbit.period = last - i;
        orbit.unique = true;
        orbit.strictly_preperiodic = orbit.preperiod >= 1;
        return orbit;
      }
    }
  }
  throw Error(ErrorCode::NoClosure,
              "no recurrence within a horizon of " + std::to_string(horizon) + " steps");
}

}  // namespace corrdyn
