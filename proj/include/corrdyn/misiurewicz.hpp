#pragma once

// Misiurewicz parameters: exact polynomial machinery for the (4,2)
// semigroup <z^2 + c, -z^2 + c> and a branch-tracking Newton refiner for
// general exponents.
//
// Indexing follows the critical orbit: z_0 = 0, z_1 = c, and the preperiod
// counts from z_0, so the cycle starts at z_preperiod with preperiod >= 2.

#include <optional>
#include <string>
#include <vector>

#include "corrdyn/correspondence.hpp"
#include "corrdyn/orbit.hpp"

namespace corrdyn {

// Branch signs sigma_1 .. sigma_{preperiod + period - 1} with
// z_{j+1} = sigma_j z_j^2 + c.
struct SignSequence {
  std::vector<int> signs;
  int preperiod = 2;
  int period = 1;

  // Throws InvalidArgument on preperiod < 2, period < 1, a length mismatch or a sign not in {-1, +1}.
  void validate() const;
  int sign(int j) const { return signs.at(static_cast<std::size_t>(j - 1)); }

  // "+-+" style strings.
  static SignSequence parse(const std::string& text, int preperiod, int period);
  std::string str() const;

  friend bool operator==(const SignSequence&, const SignSequence&) = default;
};

struct MisiurewiczReport {
  Complex a;
  Exponent exponent{4, 2};
  int preperiod = 2;
  int period = 1;
  std::optional<SignSequence> signs;
  std::vector<Complex> orbit;  // z_0 .. z_{preperiod + period}
  Complex multiplier;          // lambda(a), derivative of the return map along the cycle
  Complex w_prime;             // derivative of c -> z_{preperiod+period}(c) - z_preperiod(c) at a
  Complex u_prime;             // w' / (lambda - 1)
  Complex g_prime;             // derivative of the branch composition z_1 -> z_preperiod
  Complex mu;                  // g' / u'
  double residual = 0.0;

  Complex cycle_point() const { return orbit.at(static_cast<std::size_t>(preperiod)); }
};

struct PolyValue {
  Complex value;
  Complex derivative;
};

// F_1 = c, F_{j+1} = sigma_j F_j^2 + c together with dF_j/dc.
PolyValue f_poly_eval(Complex c, const SignSequence& s, int j);

struct SolveOptions {
  int newton_iterations = 64;
  // Upper bound on the membership depth of the survivor test in the orbit
  // cross-check.  Orbit points carry rounding error and sit just off a set
  // with empty interior, so the depth actually used is also limited by the
  // error amplification along the orbit.
  int engine_depth = 40;
};

MisiurewiczReport solve_misiurewicz_42(const SignSequence& s, Complex c0, const SolveOptions& options = {});

// Tries every sign sequence of length preperiod + period - 1 from c0 and
// returns the validated report closest to c0, if any.
std::optional<MisiurewiczReport> search_sign_patterns_42(int preperiod, int period, Complex c0,
                                                         const SolveOptions& options = {});

inline constexpr double kMisiurewiczResidual = 1e-10;
inline constexpr double kTransversalityFloor = 1e-8;

Complex transversality_42(Complex a, const SignSequence& s);
Complex multiplier_42(Complex a, const SignSequence& s);

struct MuTerms {
  Complex g_prime;
  Complex u_prime;
  Complex mu;
};

MuTerms mu_constant_42(Complex a, const SignSequence& s);

// Reads sigma_j off an orbit of the (4,2) correspondence: +1 when
// z_{j+1} - c matches z_j^2 within 1e-6 max(1, |z_j|^2), -1 when it matches -z_j^2.
std::optional<SignSequence> signs_from_orbit(std::span<const Complex> orbit, Complex c, int preperiod,
                                             int period);

// Orbit of 0 under c: z_1 = c, then at each step the image that survives
// longest (Inside beats any escape time; ties to the smallest branch index).
std::vector<Complex> survivor_orbit(Complex c, const Exponent& exp, const EscapeConfig& cfg, int length);

struct TrackedOrbit {
  std::vector<Complex> points;       // z_0 .. z_n
  std::vector<Complex> derivatives;  // dz_j / dc
};

// Orbit of 0 under c continuing the branches of `reference` (nearest image
// at each step).  Throws BranchJump when the two closest images are within
// 10 merge_eps of each other or the orbit hits the branch point.
TrackedOrbit track_orbit(Complex c, const Exponent& exp, std::span<const Complex> reference, double merge_eps);

MisiurewiczReport refine_misiurewicz_numeric(const Exponent& exp, Complex c0, int preperiod, int period,
                                             const EscapeConfig& cfg, const SolveOptions& options = {});

// Tries (preperiod, period) pairs in order of increasing preperiod + period
// (then increasing preperiod) and returns the first validated report.
MisiurewiczReport refine_misiurewicz_auto(const Exponent& exp, Complex c0, const EscapeConfig& cfg,
                                          int max_preperiod = 8, int max_period = 4,
                                          const SolveOptions& options = {});

}  // namespace corrdyn
