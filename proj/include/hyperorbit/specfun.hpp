#pragma once

// Special functions and representation-theoretic identities for the
// complementary series of SL(2,R): log-gamma, Gauss 2F1, the bi-K-isotypic
// radial functions Phi_{2n,2k}, ladder and Casimir operators in polar
// coordinates (theta1, r, theta2) on the disk, line-model normalisations
// and matrix coefficients.

#include <complex>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "hyperorbit/hyperbolic_core.hpp"

namespace hyperorbit::specfun {

// sign * exp(log_abs). A zero value (reciprocal gamma at a pole) has sign 0.
struct SignedLog {
  double log_abs = 0;
  int sign = 1;

  double value() const;
};

// log|Gamma(x)| and the sign of Gamma(x). Throws DomainError at x = 0, -1, ...
SignedLog log_gamma(double x);
long double log_gamma_ld(long double x, int* sign);

// 1 / Gamma(x) in signed-log form; zero at the poles of Gamma.
SignedLog log_reciprocal_gamma(double x);

// prod Gamma(numerator) / prod Gamma(denominator), with poles in the
// denominator giving zero. Throws DomainError on a numerator pole.
double gamma_ratio(std::initializer_list<double> numerator, std::initializer_list<double> denominator);
SignedLog log_gamma_ratio(std::initializer_list<double> numerator,
                          std::initializer_list<double> denominator);

enum class Hyp2F1Method { series, connection, degenerate_series };

struct Hyp2F1Result {
  double value = 0;
  Hyp2F1Method method = Hyp2F1Method::series;
  // Estimated absolute truncation error of the summed series.
  double error_bound = 0;
};

// Gauss 2F1(a, b; c; z) for real parameters and z in [0, 1). Direct series
// for z <= 1/2, the 1-z connection formula above that; when c-a-b is an
// integer the connection formula is singular and the direct series is summed
// to convergence instead.
double hyp2f1(double a, double b, double c, double z);
Hyp2F1Result hyp2f1_detailed(double a, double b, double c, double z);
// Individual routes, exposed for cross-checking on their overlap.
double hyp2f1_series(double a, double b, double c, double z);
double hyp2f1_connection(double a, double b, double c, double z);

// Complementary-series parameter s in (1/2, 1) with K-types 2n, 2k.
struct ReprParams {
  double s = 0.75;
  int n = 0;
  int k = 0;

  // +1 if n >= k, else -1.
  int epsilon() const { return n >= k ? 1 : -1; }
  double lambda() const { return s * (1 - s); }
  // Throws DomainError unless 1/2 < s < 1.
  void validate() const;
};

// Phi_{2n,2k}(r) = (1-r^2)^s r^{|n-k|} 2F1(s - eps k, s + eps n; 1 + |n-k|; r^2).
double phi(const ReprParams& p, double r);
long double phi_ld(const ReprParams& p, long double r);
// Same function at r = tanh(t/2), evaluated without forming 1 - r^2.
double phi_at_t(const ReprParams& p, double t);

// lim_{t->inf} e^{t(1-s)} Phi_{2n,2k}(a_t)
//   = 4^{1-s} Gamma(1+|n-k|) Gamma(2s-1) / (Gamma(s - eps k) Gamma(s + eps n)).
double phi_asymptotic_constant(const ReprParams& p);

// Residual of the radial Casimir equation
//   (1-r^2)^2/4 f'' + (1-r^2)^2/(4r) f'
//     + (-(1-r^2)^2 (n^2+k^2)/(4r^2) + (1-r^4) nk/(2r^2) + s(1-s)) f = 0
// with derivatives from 5-point central differences and one Richardson step.
// `scale` is the sum of the magnitudes of the individual terms.
struct OdeResidual {
  double residual = 0;
  double scale = 0;

  double relative() const { return scale > 0 ? residual / scale : residual; }
};

OdeResidual casimir_residual(const ReprParams& p, double r);
OdeResidual casimir_residual(const std::function<long double(long double)>& f, const ReprParams& p,
                             double r);

struct PolarPoint {
  double theta1 = 0;
  double r = 0.5;
  double theta2 = 0;
};

using PolarFunction = std::function<std::complex<double>(double theta1, double r, double theta2)>;

inline constexpr double kDerivativeStep = 1e-4;

// R = e^{2i theta2} (-i (1-r^2)/(2r) d/dtheta1 + (1-r^2) d/dr + i (1+r^2)/(2r) d/dtheta2)
// L = e^{-2i theta2} (i (1-r^2)/(2r) d/dtheta1 + (1-r^2) d/dr - i (1+r^2)/(2r) d/dtheta2)
std::complex<double> apply_raising(const PolarFunction& f, PolarPoint at,
                                   double h = kDerivativeStep);
std::complex<double> apply_lowering(const PolarFunction& f, PolarPoint at,
                                    double h = kDerivativeStep);
PolarFunction raised(PolarFunction f, double h = kDerivativeStep);
PolarFunction lowered(PolarFunction f, double h = kDerivativeStep);

// Phi_{2n,2k}(r) e^{2in theta1} e^{2ik theta2} as a function on G.
PolarFunction phi_on_group(const ReprParams& p);

// Scalar c with R Phi_{2n,2k} = c Phi_{2n,2k+2} (resp. L, Phi_{2n,2k-2}).
double raising_coefficient(const ReprParams& p);
double lowering_coefficient(const ReprParams& p);

// <X^k v0, X^k v0> = 2^{2k} Gamma(s+k) Gamma(1-s+k) / (Gamma(s) Gamma(1-s)).
double ladder_norm_b(int k, double s);

// Line-model norm <f_{2k,s}, f_{2k,s}> = 4^{1-s} pi^2 (-1)^k Gamma(2s-1) / (Gamma(s-k) Gamma(s+k)).
double line_model_norm_btilde(int k, double s);

// I f_{2k,s} = C f_{2k,1-s}; returns C = 4^{1-s} pi (-1)^k Gamma(2s-1) / (Gamma(s-k) Gamma(s+k)).
double intertwine_constant(int k, double s);

// f_{2k,s}(x) = (x-i)^{k-s} (x+i)^{-k-s} = ((x-i)/(x+i))^k (1+x^2)^{-s}.
std::complex<double> line_model_vector(int k, double s, double x);

// <pi(g) v_{2k}, v_{2n}> for the orthonormal ladder basis.
std::complex<double> matrix_coefficient(const ReprParams& p, const CartanCoords& g);
double matrix_coefficient_radial(const ReprParams& p, double r);

// Truncated Fourier model sum_{|n| <= N} c_{2n} Phi_{2n,0}(r) e^{2in theta1}.
struct FourierModel {
  double s = 0.75;
  std::vector<std::complex<double>> coeffs;  // index n + N
  int max_n() const { return (static_cast<int>(coeffs.size()) - 1) / 2; }
  std::complex<double> coefficient(int n) const;
  PolarFunction as_function() const;
};

struct OriginCheck {
  int k = 0;
  std::complex<double> numeric;
  std::complex<double> expected;  // c_{2k} 2^k k!
  double error = 0;
  bool pass = false;
};

// Applies R^k to the model by finite differences, extrapolates the value at
// the identity from small r, and compares with c_{2k} 2^k Gamma(k+1).
OriginCheck origin_values_check(const FourierModel& model, int k, double tolerance);

// t e^{-t/2} |v| |w|: tempered matrix-coefficient envelope.
double tempered_decay_bound(double t, double norm_v = 1, double norm_w = 1);
// e^{-theta t} (|v||w|)^{1/2} (S v S w)^{1/2}: envelope with spectral gap theta.
double spectral_gap_decay_bound(double t, double theta, double norm_v = 1, double norm_w = 1,
                                double sobolev_v = 1, double sobolev_w = 1);

}  // namespace hyperorbit::specfun
