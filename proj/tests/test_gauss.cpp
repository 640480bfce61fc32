#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "isacfb/gauss.hpp"

using isacfb::q_func;
using isacfb::q_inv;

namespace {

// quadrature oracle for the Gaussian upper tail: composite Simpson over
// [x, 40] with a fine fixed grid; independent of erfc
double tail_quadrature(double x) {
  const double hi = 40.0;
  const int steps = 200000;  // even
  const double h = (hi - x) / steps;
  auto phi = [](double t) { return std::exp(-0.5 * t * t) * 0.39894228040143268; };
  double acc = phi(x) + phi(hi);
  for (int i = 1; i < steps; ++i) acc += phi(x + h * i) * (i % 2 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

// bisection on the quadrature oracle
double q_inv_oracle(double p) {
  double lo = -10.0, hi = 10.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (tail_quadrature(mid) > p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("q_func basic values") {
  CHECK(q_func(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(q_inv(0.5) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(q_func(3.0) + q_func(-3.0) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("q_inv matches the tail-integral oracle at 0.05") {
  const double oracle = q_inv_oracle(0.05);
  CHECK(std::abs(q_inv(0.05) - oracle) < 1e-8);
  CHECK(q_inv(0.05) == doctest::Approx(1.6448536).epsilon(1e-7));
}

TEST_CASE("q_inv inverts q_func on [-3,3]") {
  for (int i = -3; i <= 3; ++i) {
    const double x = static_cast<double>(i);
    CHECK(std::abs(q_inv(q_func(x)) - x) < 1e-9);
  }
  // a few non-integer points, including fairly deep tails
  for (double x : {-5.5, -1.2345, 0.321, 4.75, 7.0}) {
    CHECK(std::abs(q_inv(q_func(x)) - x) < 1e-9);
  }
}

TEST_CASE("q_inv rejects arguments outside (0,1)") {
  CHECK_THROWS_AS(q_inv(0.0), std::domain_error);
  CHECK_THROWS_AS(q_inv(1.0), std::domain_error);
  CHECK_THROWS_AS(q_inv(-0.3), std::domain_error);
  CHECK_THROWS_AS(q_inv(1.7), std::domain_error);
}
