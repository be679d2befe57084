#include <doctest.h>

#include <cmath>
#include <complex>
#include <sstream>

#include "hyperorbit/error.hpp"
#include "hyperorbit/group_orbit.hpp"
#include "hyperorbit/sector_count.hpp"

using namespace hyperorbit;

namespace {

// theta1 from the disk image of g.i: half the argument of (g.i - i)/(g.i + i).
double theta1_by_hand(const GroupElement& g) {
  const std::complex<double> i(0, 1);
  const std::complex<double> z = (static_cast<double>(g.a()) * i + static_cast<double>(g.b())) /
                                 (static_cast<double>(g.c()) * i + static_cast<double>(g.d()));
  const double half = 0.5 * std::arg((z - i) / (z + i));
  return half < 0 ? half + kPi : half;
}

}  // namespace

TEST_CASE("trivial harmonic counts the ball") {
  const OrbitBall ball = enumerate_ball(gamma_c(4), 1000);
  const SectorSumRecord r = sector_sum(ball, 0, 0);
  CHECK(r.raw_count == ball.size());
  CHECK(r.value.real() == doctest::Approx(static_cast<double>(ball.size())));
  CHECK(r.value.imag() == 0);
}

TEST_CASE("sector sum over the generators") {
  const OrbitBall ball = enumerate_ball(gamma_c(4), 5);
  REQUIRE(ball.size() == 5);
  std::complex<double> expected = 1;
  for (const auto& p : ball.elements) {
    if (!p.element.is_identity()) expected += std::polar(1.0, 2 * theta1_by_hand(p.element));
  }
  CHECK(std::abs(sector_sum(ball, 1, 0).value - expected) < 1e-13);
}

TEST_CASE("conjugate harmonics give conjugate sums") {
  const OrbitBall ball = enumerate_ball(gamma_c(4), 3000);
  for (int n = -8; n <= 8; n += 3) {
    for (int k = -8; k <= 8; k += 5) {
      const auto a = sector_sum(ball, n, k).value;
      const auto b = sector_sum(ball, -n, -k).value;
      CHECK(std::abs(a - std::conj(b)) < 1e-9 * static_cast<double>(ball.size()));
    }
  }
}

TEST_CASE("growth scan") {
  const OrbitBall ball = enumerate_ball(gamma_c(4), 30000);
  std::vector<double> grid;
  for (int i = 0; i <= 15; ++i) grid.push_back(1000 * std::pow(30.0, i / 15.0));
  grid.back() = 30000;
  const auto scan = growth_scan(ball, grid, 0, 0);
  const auto counts = count_growth(ball, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) CHECK(scan[i].raw_count == counts[i].count);
  for (std::size_t i = 1; i < grid.size(); ++i) CHECK(scan[i].raw_count >= scan[i - 1].raw_count);
  const auto h = growth_scan(ball, grid, 1, 1);
  const std::size_t top = h.size() - 1;
  const double x = std::abs(h[top].value) / static_cast<double>(h[top].raw_count);
  const double y = std::abs(h[top - 1].value) / static_cast<double>(h[top - 1].raw_count);
  CHECK(std::fabs(x - y) < 0.05);
  const std::vector<double> too_far = {50000};
  CHECK_THROWS_AS(growth_scan(ball, too_far, 0, 0), DomainError);
}

TEST_CASE("sector indicator counts") {
  const OrbitBall ball = enumerate_ball(gamma_c(4), 1000);
  const AngleInterval full;
  CHECK(sector_indicator_count(ball, full, full, 0, 1e9) == ball.size());
  CHECK(sector_indicator_count(ball, {0.5, 0.5}, full, 0, 1e9) == 0);

  const AngleInterval left{0, kPi / 2};
  const AngleInterval right{kPi / 2, kPi};
  std::size_t brute = 0;
  for (const auto& p : ball.elements) {
    const double t1 = p.element.is_identity() ? 0 : theta1_by_hand(p.element);
    const double t2 = p.coords.degenerate ? 0 : p.coords.theta2;
    const double rho = std::exp(p.coords.t / 2);
    if (t1 < kPi / 2 && t2 >= kPi / 2 && rho > 3 && rho < 20) ++brute;
  }
  CHECK(sector_indicator_count(ball, left, right, 3, 20) == brute);

  // rho = e^{t/2} is the top singular value, so ||g||_F sits above it.
  for (const auto& p : ball.elements) {
    CHECK(scale_parameter(p, ScaleMode::frobenius) >= scale_parameter(p, ScaleMode::flow) - 1e-9);
  }
}

TEST_CASE("affine window counts") {
  const OrbitBall ball = enumerate_ball(gamma_c(4), 1000);
  AffineQuery q;
  q.v = {1, 0};
  q.w = {0, 3};
  q.N = 3000;
  q.K = 10;
  q.T = 1000;
  q.n_target = 600;
  std::size_t brute = 0;
  for (const auto& p : ball.elements) {
    if (std::llabs(3 * p.element.b() - 600) * 10 < 3000) ++brute;
  }
  CHECK(affine_window_count(ball, q).count == brute);

  // <v g, w> = 3b is never 1, and a window of radius below 1 only admits exact hits.
  q.n_target = 1;
  q.K = 4000;
  CHECK(affine_window_count(ball, q).count == 0);

  // The identity alone: <v, w> = 0 lies in the window iff |0 - n| < N/K.
  const OrbitBall id_only = enumerate_ball(gamma_c(4), 2);
  q.K = 10;
  q.n_target = 299;
  CHECK(affine_window_count(id_only, q).count == 1);
  q.n_target = 300;
  CHECK(affine_window_count(id_only, q).count == 0);

  q.mode = QueryMode::vector_window;
  CHECK_THROWS_AS(affine_window_count(ball, q), DomainError);
}

TEST_CASE("regime warnings") {
  AffineQuery q;
  q.v = {1, 0};
  q.w = {0, 3};
  q.N = 40000;
  q.K = 10;
  q.T = 10000;
  q.n_target = 11000;
  CHECK(regime_warnings(q).empty());
  q.n_target = 100;
  CHECK_FALSE(regime_warnings(q).empty());
  q.n_target = 11000;
  q.v = {3, 4};
  CHECK_FALSE(regime_warnings(q).empty());
  q.v_scale = 5;
  CHECK(regime_warnings(q).empty());
}

TEST_CASE("vector window counts") {
  const OrbitBall ball = enumerate_ball(gamma_c(4), 1000);
  AffineQuery q;
  q.mode = QueryMode::vector_window;
  q.cd = {1, 0};
  q.y = {0, 0};
  q.q = 1;
  q.N = 1e7;
  q.K = 1;
  q.T = 1000;
  CHECK(vector_window_count(ball, q).count == ball.size());

  // Rows (0,1) g are (c, d) = (0, 1) mod 4, never (1, 1) mod 2.
  q.cd = {0, 1};
  q.y = {1, 1};
  q.q = 2;
  CHECK(vector_window_count(ball, q).count == 0);

  q.cd = {1, 0};
  q.y = {40, 7};
  q.q = 3;
  q.N = 3000;
  q.K = 10;
  std::size_t brute = 0;
  for (const auto& p : ball.elements) {
    const long long x = p.element.a() - 40;
    const long long y = p.element.b() - 7;
    const bool congruent = ((x % 3) + 3) % 3 == 0 && ((y % 3) + 3) % 3 == 0;
    if (congruent && (x * x + y * y) * 100 < 3000LL * 3000) ++brute;
  }
  CHECK(brute > 0);
  CHECK(vector_window_count(ball, q).count == brute);
}

TEST_CASE("normalized statistic and csv") {
  CHECK(normalized_upper_statistic(10, 4, 3, 100, 0.5) == doctest::Approx(10 * 8.0 * 9 / 100));
  std::vector<SectorSumRecord> rows = {{1, 0, 10, {2, -1}, 5}};
  std::ostringstream out;
  write_sector_csv(rows, out);
  CHECK(out.str() == "n,k,T,re,im,raw_count\n1,0,10,2,-1,5\n");
}
