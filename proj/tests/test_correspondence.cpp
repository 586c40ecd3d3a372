#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "corrdyn/correspondence.hpp"

using namespace corrdyn;

namespace {

bool contains(const std::vector<Complex>& set, Complex z, double tol = 1e-12) {
  return std::any_of(set.begin(), set.end(), [&](Complex w) { return std::abs(w - z) <= tol; });
}

Complex random_point(std::mt19937_64& rng, double radius) {
  std::uniform_real_distribution<double> u(-radius, radius);
  return {u(rng), u(rng)};
}

}  // namespace

TEST_SUITE("correspondence") {

TEST_CASE("exponent validation") {
  CHECK_NOTHROW(Exponent(2, 1));
  CHECK_NOTHROW(Exponent(64, 63));
  CHECK_THROWS_AS(Exponent(2, 2), Error);
  CHECK_THROWS_AS(Exponent(1, 2), Error);
  CHECK_THROWS_AS(Exponent(3, 0), Error);
  CHECK_THROWS_AS(Exponent(65, 2), Error);
  CHECK(Exponent(4, 2).integral());
  CHECK_FALSE(Exponent(5, 2).integral());
  // (4,2) stays a 4:2 correspondence; it is not reduced to (2,1)
  CHECK_FALSE(Exponent(4, 2) == Exponent(2, 1));
}

TEST_CASE("forward images: examples") {
  const auto crit = forward_images(0.0, {0.3, 0.1}, Exponent(5, 2));
  REQUIRE(crit.size() == 1);
  CHECK(crit[0] == Complex(0.3, 0.1));

  const auto unit = forward_images(1.0, 0.0, Exponent(4, 2));
  REQUIRE(unit.size() == 2);
  CHECK(contains(unit, 1.0));
  CHECK(contains(unit, -1.0));

  const auto two = forward_images(2.0, -2.0, Exponent(4, 2));
  REQUIRE(two.size() == 2);
  CHECK(contains(two, 2.0, 0.0));
  CHECK(contains(two, -6.0, 0.0));
}

TEST_CASE("forward images: integral branches are exact") {
  const Complex z{0.37, -1.21};
  const Complex c{-0.4, 0.2};
  const auto w = forward_images(z, c, Exponent(4, 2));
  REQUIRE(w.size() == 2);
  CHECK(w[0] == z * z + c);
  CHECK(w[1] == -(z * z) + c);
}

TEST_CASE("forward images: defining equation and branch count") {
  std::mt19937_64 rng(11);
  const Exponent exps[] = {{2, 1}, {3, 2}, {4, 2}, {5, 2}, {7, 3}, {9, 4}};
  for (const Exponent& e : exps) {
    for (int i = 0; i < 200; ++i) {
      const Complex z = random_point(rng, 2.0);
      const Complex c = random_point(rng, 1.5);
      const auto w = forward_images(z, c, e);
      REQUIRE(static_cast<int>(w.size()) == e.q());
      const Complex zp = ipow(z, e.p());
      for (const Complex& x : w) {
        CHECK(std::abs(ipow(x - c, e.q()) - zp) <= 1e-10 * std::max(1.0, std::abs(zp)));
      }
      for (std::size_t a = 0; a < w.size(); ++a) {
        for (std::size_t b = a + 1; b < w.size(); ++b) CHECK(std::abs(w[a] - w[b]) > 0.0);
      }
    }
  }
}

TEST_CASE("forward images: principal-argument branch indexing") {
  // arg(-1) = pi, so for (3,2) branch 0 is exp(3 i pi / 2) = -i.
  const auto w = forward_images(-1.0, 0.0, Exponent(3, 2));
  REQUIRE(w.size() == 2);
  CHECK(std::abs(w[0] - Complex(0, -1)) < 1e-15);
  CHECK(std::abs(w[1] - Complex(0, 1)) < 1e-15);
}

TEST_CASE("branch derivative: examples") {
  CHECK(branch_derivative(2.0, 2.0, -2.0, Exponent(4, 2)) == Complex(4.0));
  CHECK(branch_derivative(3.0, 9.0 + Complex(0.5, 0.5), {0.5, 0.5}, Exponent(2, 1)) == Complex(6.0));
  CHECK(branch_derivative(2.0, -6.0, -2.0, Exponent(4, 2)) == Complex(-4.0));
  CHECK_THROWS_AS(branch_derivative(0.0, 1.0, 1.0, Exponent(4, 2)), Error);
}

TEST_CASE("branch derivative matches central differences of the continued branch") {
  std::mt19937_64 rng(5);
  const Exponent exps[] = {{3, 2}, {4, 2}, {5, 2}, {7, 3}};
  const double h = 1e-6;
  for (const Exponent& e : exps) {
    for (int i = 0; i < 100; ++i) {
      const Complex z = random_point(rng, 1.8);
      if (std::abs(z) < 0.2) continue;
      const Complex c = random_point(rng, 1.0);
      for (const Complex& w : forward_images(z, c, e)) {
        const Complex plus = branch_nearest(z + h, c, e, w).w;
        const Complex minus = branch_nearest(z - h, c, e, w).w;
        const Complex fd = (plus - minus) / (2.0 * h);
        const Complex exact = branch_derivative(z, w, c, e);
        CHECK(std::abs(fd - exact) <= 1e-5 * std::abs(exact));
      }
    }
  }
}

TEST_CASE("escape radius: examples") {
  CHECK(escape_radius(Exponent(2, 1), 0.0, 2.0, 0.0) == doctest::Approx(2.0).epsilon(1e-11));
  CHECK(escape_radius(Exponent(4, 2), 2.0, 2.0, 0.0) == doctest::Approx(1.0 + std::sqrt(3.0)).epsilon(1e-11));
  CHECK(escape_radius(Exponent(2, 1), 2.0, 2.0, 0.0) == doctest::Approx(1.0 + std::sqrt(3.0)).epsilon(1e-11));
  CHECK(escape_radius(Exponent(4, 2), 2.0, 2.0, 0.05) ==
        doctest::Approx(1.05 * (1.0 + std::sqrt(3.0))).epsilon(1e-11));
  CHECK_THROWS_AS(escape_radius(Exponent(2, 1), -1.0, 2.0, 0.0), Error);
  CHECK_THROWS_AS(escape_radius(Exponent(2, 1), 1.0, 1.0, 0.0), Error);
}

TEST_CASE("escape radius: monotone in c_bound and lambda") {
  const Exponent exps[] = {{2, 1}, {5, 2}, {4, 2}, {7, 3}};
  for (const Exponent& e : exps) {
    double prev = 0.0;
    for (double cb = 0.0; cb <= 10.0; cb += 0.25) {
      const double r = escape_radius(e, cb, 2.0, 0.05);
      CHECK(r >= prev);
      prev = r;
    }
    prev = 0.0;
    for (double lam = 1.1; lam <= 6.0; lam += 0.3) {
      const double r = escape_radius(e, 1.0, lam, 0.05);
      CHECK(r >= prev);
      prev = r;
    }
  }
}

TEST_CASE("escape config invariants") {
  const EscapeConfig cfg = make_escape_config(Exponent(5, 2), 1.6);
  CHECK(cfg.radius > escape_radius(Exponent(5, 2), 1.6, 2.0, 0.0));
  CHECK(cfg.merge_eps < cfg.radius / 1e4);
  CHECK_NOTHROW(cfg.validate());
  EscapeConfig bad = cfg;
  bad.merge_eps = cfg.radius;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = cfg;
  bad.max_iter = 0;
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("exterior of the escape disk is forward invariant") {
  std::mt19937_64 rng(3);
  const Exponent exps[] = {{2, 1}, {4, 2}, {5, 2}, {7, 3}};
  for (const Exponent& e : exps) {
    const double c_bound = 2.0;
    const double R = make_escape_config(e, c_bound).radius;
    std::uniform_real_distribution<double> angle(-M_PI, M_PI);
    std::uniform_real_distribution<double> modulus(R * (1.0 + 1e-9), 4.0 * R);
    std::uniform_real_distribution<double> cmod(0.0, c_bound);
    for (int i = 0; i < 1000; ++i) {
      const Complex z = std::polar(modulus(rng), angle(rng));
      const Complex c = std::polar(cmod(rng), angle(rng));
      for (const Complex& w : forward_images(z, c, e)) CHECK(std::abs(w) > std::abs(z));
    }
  }
}

TEST_CASE("branch nearest: examples") {
  const BranchChoice a = branch_nearest(2.0, -2.0, Exponent(4, 2), 2.1);
  CHECK(a.w == Complex(2.0));
  CHECK(forward_images(2.0, -2.0, Exponent(4, 2))[static_cast<std::size_t>(a.k)] == Complex(2.0));
  CHECK(branch_nearest(1.0, 0.0, Exponent(4, 2), -0.9).w == Complex(-1.0));
  const BranchChoice c = branch_nearest(1.0, 1.0, Exponent(2, 1), 0.0);
  CHECK(c.w == Complex(2.0));
  CHECK(c.k == 0);
  CHECK_THROWS_AS(branch_nearest(0.0, 1.0, Exponent(4, 2), 0.0), Error);
}

TEST_CASE("roots of unity and integer powers") {
  CHECK(root_of_unity(4, 1) == Complex(0, 1));
  CHECK(root_of_unity(2, 1) == Complex(-1, 0));
  CHECK(std::abs(root_of_unity(3, 1) - std::polar(1.0, 2 * M_PI / 3)) < 1e-15);
  CHECK(ipow(Complex(0, 1), 4) == Complex(1, 0));
  CHECK(ipow(Complex(2, 0), 10) == Complex(1024, 0));
}

}
