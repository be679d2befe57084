#pragma once

// Counting statistics over an orbit ball: harmonic sector sums, sector
// indicator counts, and the affine and vector window counts.

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hyperorbit/group_orbit.hpp"

namespace hyperorbit {

struct SectorSumRecord {
  int n = 0;
  int k = 0;
  double T = 0;
  std::complex<double> value;
  std::size_t raw_count = 0;
};

// sum over the ball of e^{2in theta1} e^{2ik theta2}; degenerate elements
// (the identity) count with theta1 = theta2 = 0.
SectorSumRecord sector_sum(const OrbitBall& ball, int n, int k);

// One record per grid value, each summing the elements with ||g||_F < T.
std::vector<SectorSumRecord> growth_scan(const OrbitBall& ball, std::span<const double> T_grid, int n,
                                         int k);

// Half-open interval [lo, hi) of angles in [0, pi).
struct AngleInterval {
  double lo = 0;
  double hi = kPi;
  bool contains(double x) const { return x >= lo && x < hi; }
};

enum class ScaleMode {
  flow,       // rho = e^{t/2}, the A-component
  frobenius,  // rho = ||g||_F, the paper's approximation
};

double scale_parameter(const OrbitPoint& p, ScaleMode mode);

// #{gamma : theta1 in psi, theta2 in phi, rho_lo < rho < rho_hi}.
std::size_t sector_indicator_count(const OrbitBall& ball, AngleInterval psi, AngleInterval phi,
                                   double rho_lo, double rho_hi, ScaleMode mode = ScaleMode::flow);

using IntVec = std::pair<Int, Int>;

enum class QueryMode { lower_bound, vector_window };

struct AffineQuery {
  QueryMode mode = QueryMode::lower_bound;
  IntVec v{1, 0};
  IntVec w{0, 1};
  Int n_target = 0;
  IntVec cd{0, 1};
  IntVec y{0, 0};
  Int q = 1;
  double N = 0;
  double K = 1;
  double T = 0;
  // Upper limit for |v| in the lower-bound regime check.
  double v_scale = 1;
};

// Regime violations as human-readable warnings; empty when all hold.
std::vector<std::string> regime_warnings(const AffineQuery& query);

struct WindowCount {
  std::size_t count = 0;
  std::vector<std::string> warnings;
};

// #{gamma : |<v gamma, w> - n| < N/K}, exact in the integers.
WindowCount affine_window_count(const OrbitBall& ball, const AffineQuery& query);

// #{gamma : |(c,d) gamma - y| < N/K, (c,d) gamma = y mod q}.
WindowCount vector_window_count(const OrbitBall& ball, const AffineQuery& query);

// count * K^{1+delta} q^2 / T^{2 delta}.
double normalized_upper_statistic(std::size_t count, double K, Int q, double T, double delta);

// n,k,T,re,im,raw_count
void write_sector_csv(std::span<const SectorSumRecord> records, std::ostream& out);

}  // namespace hyperorbit
