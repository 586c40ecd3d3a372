#pragma once

// Set-valued forward iteration with escape pruning.

#include <optional>
#include <span>
#include <vector>

#include "corrdyn/correspondence.hpp"

namespace corrdyn {

// Live forward images at one iteration depth.  Points lie in the closed
// escape disk, are pairwise further apart than merge_eps and are sorted
// lexicographically by (re, im).
struct OrbitSet {
  std::vector<Complex> points;
  int depth = 0;
  bool truncated = false;
};

enum class Membership { Inside, Escaped };

struct MembershipVerdict {
  Membership status = Membership::Inside;
  // Escaped: first step with an empty live set (0 when |z| > R).
  // Inside: max_iter.
  int steps = 0;
  // branch_cap was hit at least once; the verdict is heuristic.
  bool truncated = false;

  bool inside() const noexcept { return status == Membership::Inside; }
};

struct BoundedOrbit {
  std::vector<Complex> points;  // z_0 .. z_{preperiod + period}
  std::vector<int> branches;    // branch index used for z_j -> z_{j+1}
  int preperiod = 0;
  int period = 1;
  bool unique = false;
  bool strictly_preperiodic = false;
};

inline constexpr double kClosureTolerance = 1e-9;

OrbitSet iterate_set(const OrbitSet& set, Complex c, const Exponent& exp, const EscapeConfig& cfg);

// Reusable buffers for repeated membership queries (one per thread).
struct OrbitWorkspace {
  std::vector<Complex> current;
  std::vector<Complex> next;
  std::vector<Complex> scratch;
};

MembershipVerdict in_filled_julia(Complex z, Complex c, const Exponent& exp,
                                  const EscapeConfig& cfg);
MembershipVerdict in_filled_julia(Complex z, Complex c, const Exponent& exp,
                                  const EscapeConfig& cfg, OrbitWorkspace& ws);

// Follows the orbit of z while exactly one forward image stays in K_c
// (membership tested to depth cfg.max_iter).  Returns nullopt as soon as a
// step has zero or several surviving images.  Throws NoClosure when no
// recurrence |z_j - z_i| <= 1e-9 shows up within `horizon` steps.
std::optional<BoundedOrbit> unique_bounded_orbit(Complex z, Complex c, const Exponent& exp,
                                                 const EscapeConfig& cfg, int horizon);

namespace detail {

// Canonical order, merge of points within eps (keeping the lexicographically
// first of each cluster), then truncation to the `cap` points of smallest
// modulus.  Returns true when truncation happened.
bool canonicalize(std::vector<Complex>& points, double eps, int cap, std::vector<Complex>& scratch);

}  // namespace detail

}  // namespace corrdyn
