#pragma once

// Patterson-Sullivan approximations from an orbit ball: critical-exponent
// estimators, the boundary measure and its Fourier coefficients.

#include <complex>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hyperorbit/group_orbit.hpp"

namespace hyperorbit {

struct Atom {
  double angle = 0;  // in [0, pi)
  double weight = 0;
};

struct BoundaryMeasure {
  std::vector<Atom> atoms;  // sorted by angle, distinct angles
  double s_used = 0;
  double T_used = 0;
  double delta_hat = 0;
  bool normalized = false;
  // No atoms survived (e.g. a ball holding only the identity).
  bool empty = true;
  std::vector<std::string> warnings;

  double total_mass() const;
};

enum class ExponentMethod { count_fit, poincare_abscissa };

std::string to_string(ExponentMethod m);

struct ExponentEstimate {
  double delta_hat = 0;
  double stderr_ = 0;
  ExponentMethod method = ExponentMethod::count_fit;
  std::pair<double, double> T_range{0, 0};
  double r_squared = 0;
};

// Least-squares slope / 2 of log N against log T. Needs >= 5 points over
// >= 2 decades; throws DomainError otherwise.
ExponentEstimate estimate_delta_countfit(std::span<const GrowthPoint> counts);

// Abscissa of convergence of sum e^{-s t(gamma)}. The top two decades of T
// are cut into shells of equal width in t; for each s the shell sums are
// fitted to e^{e(s) t} and the root of e(s) is found by bisection on [0, 1].
// Returns 0 if the series already converges at s = 0.
ExponentEstimate estimate_delta_poincare(const OrbitBall& ball);
// Same, from raw displacement values t >= 0 and the cut-off t_max.
ExponentEstimate estimate_delta_poincare(std::span<const double> t_values, double t_max);

// Displacement t with ||g||_F^2 = 2 cosh t.
double t_from_frobenius(double T);

// delta_hat + 1 / log(T_max).
double default_s(double delta_hat, double T_max);

struct MeasureOptions {
  // Elements with t below this carry interior mass and are skipped.
  double min_t = 1.0;
  // Compared against s; a warning is recorded when s <= delta_hat.
  double delta_hat = 0;
};

// Atoms at theta1(gamma) with weight e^{-s t(gamma)}, identical angles merged,
// normalized to mass 1.
BoundaryMeasure build_measure(const OrbitBall& ball, double s, const MeasureOptions& options = {});
BoundaryMeasure build_measure(std::span<const double> angles, std::span<const double> t_values,
                              double s, double T, const MeasureOptions& options = {});

// sum_j w_j e^{2 i n alpha_j}.
std::complex<double> fourier_coefficient(const BoundaryMeasure& m, int n);

// Gamma(delta+|n|) / (Gamma(delta) Gamma(1+|n|)) * mu_hat(-2n).
std::complex<double> c2n_from_mu(const BoundaryMeasure& m, int n, double delta);
std::complex<double> c2n_from_coefficient(std::complex<double> mu_hat_minus_2n, int n, double delta);

// Mass of atoms with angle in [lo, hi] (wrapping when lo > hi).
double arc_mass(const BoundaryMeasure& m, double lo, double hi);

// Boundary arcs in [0, pi) with no limit points, from the ping-pong
// certificate; empty if the group has none.
std::vector<std::pair<double, double>> forbidden_arcs(const GroupPresentation& group);

// angle,weight rows after "# s_used", "# T_used", "# delta_hat" header lines.
void write_measure_csv(const BoundaryMeasure& m, std::ostream& out);

}  // namespace hyperorbit
