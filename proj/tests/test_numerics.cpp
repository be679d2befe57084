#include <doctest.h>

#include <cmath>
#include <complex>
#include <numeric>
#include <vector>

#include "hyperorbit/numerics.hpp"

using namespace hyperorbit;

TEST_CASE("pairwise sums") {
  CHECK(pairwise_sum(std::vector<double>{}) == 0);
  std::vector<double> v(1000);
  std::iota(v.begin(), v.end(), 1.0);
  CHECK(pairwise_sum(v) == 500500);
  // 1 followed by many tiny terms: naive left-to-right summation drops them all.
  std::vector<double> w(1 << 20, 1e-16);
  w[0] = 1;
  CHECK(std::fabs(pairwise_sum(w) - (1 + 1e-16 * ((1 << 20) - 1))) < 1e-15);
  std::vector<std::complex<double>> z = {{1, 2}, {3, -4}, {0.5, 0.5}};
  CHECK(pairwise_sum(z) == std::complex<double>(4.5, -1.5));
}

TEST_CASE("line fits") {
  const std::vector<double> x = {0, 1, 2, 3, 4};
  const std::vector<double> y = {1, 3, 5, 7, 9};
  const LineFit f = fit_line(x, y);
  CHECK(f.slope == doctest::Approx(2));
  CHECK(f.intercept == doctest::Approx(1));
  CHECK(f.r_squared == doctest::Approx(1));
  CHECK(f.slope_stderr == doctest::Approx(0).epsilon(1e-12));
  const std::vector<double> noisy = {1.1, 2.9, 5.2, 6.8, 9.1};
  const LineFit g = fit_line(x, noisy);
  CHECK(g.r_squared < 1);
  CHECK(g.slope_stderr > 0);
  double residual_sum = 0;
  for (double r : g.residuals) residual_sum += r;
  CHECK(std::fabs(residual_sum) < 1e-12);
}
