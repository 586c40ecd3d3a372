#pragma once

// Independent reference implementations used as test oracles.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <vector>

namespace oracle {

using Complex = std::complex<double>;

// Classical single-valued escape time for z -> z^2 + c: the first n <= N
// with |z_n| > radius, or -1 when z_0 .. z_N all stay inside.
inline int escape_step_quadratic(Complex z, Complex c, double radius, int max_iter) {
  for (int n = 0; n <= max_iter; ++n) {
    if (std::norm(z) > radius * radius) return n;
    z = z * z + c;
  }
  return -1;
}

inline double brute_force_hausdorff(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  auto directed = [](const std::vector<Complex>& from, const std::vector<Complex>& to) {
    double worst = 0.0;
    for (const Complex& x : from) {
      double best = std::numeric_limits<double>::infinity();
      for (const Complex& y : to) best = std::min(best, std::abs(x - y));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(directed(a, b), directed(b, a));
}

}  // namespace oracle
