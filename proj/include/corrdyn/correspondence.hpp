#pragma once

// Primitive operations of the multivalued map  z -> (z^p)^(1/q) + c.
//
// A nonzero z has exactly q forward images.  Branches are indexed by the
// principal argument arg(z) in (-pi, pi]:
//
//   w_k = c + |z|^(p/q) * exp(i (p arg z + 2 pi k) / q),   k = 0..q-1.
//
// The critical point z = 0 has the single image c.

#include <complex>
#include <cstdint>
#include <vector>

#include "corrdyn/error.hpp"

namespace corrdyn {

using Complex = std::complex<double>;

inline constexpr int kMaxExponent = 64;

class Exponent {
 public:
  // Throws InvalidArgument unless p > q >= 1 and p, q <= kMaxExponent.
  Exponent(int p, int q);

  int p() const noexcept { return p_; }
  int q() const noexcept { return q_; }
  double ratio() const noexcept { return static_cast<double>(p_) / q_; }
  // True when q divides p, i.e. every branch is a polynomial  c + omega * z^(p/q).
  bool integral() const noexcept { return p_ % q_ == 0; }

  friend bool operator==(const Exponent&, const Exponent&) = default;

 private:
  int p_;
  int q_;
};

struct EscapeConfig {
  double lambda_esc = 2.0;
  double radius = 0.0;
  int max_iter = 200;
  double merge_eps = 0.0;
  int branch_cap = 4096;
  // Relative margin applied on top of the escape-radius root.
  double margin = 0.05;

  // Throws InvalidArgument when a field is out of range.
  void validate() const;
};

// Escape configuration for parameters with |c| <= c_bound using the default
// merge tolerance radius * 1e-9.
EscapeConfig make_escape_config(const Exponent& exp, double c_bound, int max_iter = 200,
                                double lambda_esc = 2.0, double margin = 0.05);

std::vector<Complex> forward_images(Complex z, Complex c, const Exponent& exp);

// Appends the images to `out` without clearing it.
void append_forward_images(Complex z, Complex c, const Exponent& exp, std::vector<Complex>& out);

// Derivative p z^(p-1) / (q (w - c)^(q-1)) of the local univalent branch
// sending z to w.  Throws BranchPoint for z = 0.
Complex branch_derivative(Complex z, Complex w, Complex c, const Exponent& exp);

// R = x0 * (1 + margin), x0 the larger positive root of
// x^(p/q) - lambda_esc * x - c_bound = 0.
double escape_radius(const Exponent& exp, double c_bound, double lambda_esc, double margin);

struct BranchChoice {
  Complex w;
  int k = 0;
};

// Forward image closest to `target`; ties go to the smallest k.
BranchChoice branch_nearest(Complex z, Complex c, const Exponent& exp, Complex target);

// q-th root of unity exp(2 pi i k / q), exact for the quarter turns.
Complex root_of_unity(int q, int k);

Complex ipow(Complex z, int n);

}  // namespace corrdyn
