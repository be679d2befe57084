#include "hyperorbit/specfun.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <tuple>

#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/float128.hpp>

#include "hyperorbit/error.hpp"

namespace hyperorbit::specfun {

namespace {

constexpr long double kPiL = 3.141592653589793238462643383279502884L;
constexpr long double kHalfLog2Pi = 0.918938533204672741780329736405617639L;

bool is_nonpositive_integer(long double x) { return x <= 0 && x == std::floor(x); }

// sin(pi x) with exact reduction of the argument.
long double sin_pi(long double x) {
  long double r = std::fmod(x, 2.0L);
  if (r < 0) r += 2.0L;
  long double sign = 1;
  if (r >= 1.0L) {
    r -= 1.0L;
    sign = -1;
  }
  if (r > 0.5L) r = 1.0L - r;
  return sign * std::sin(kPiL * r);
}

long double stirling(long double y) {
  static constexpr long double kCoeffs[] = {
      1.0L / 12,        -1.0L / 360,   1.0L / 1260,        -1.0L / 1680,
      1.0L / 1188,      -691.0L / 360360, 1.0L / 156,     -3617.0L / 122400};
  const long double inv = 1.0L / y;
  const long double inv2 = inv * inv;
  long double series = 0;
  long double power = inv;
  for (long double c : kCoeffs) {
    series += c * power;
    power *= inv2;
  }
  return (y - 0.5L) * std::log(y) - y + kHalfLog2Pi + series;
}

// Wide enough that the two branches of the connection formula can cancel by
// ~1e15 and still leave double-precision accuracy.
using Quad = boost::multiprecision::float128;

template <typename Real>
struct SeriesSum {
  Real value = 0;
  Real tail = 0;
  bool converged = true;
};

template <typename Real>
SeriesSum<Real> gauss_series(Real a, Real b, Real c, Real z, long max_terms = 2'000'000) {
  using std::abs;
  using boost::multiprecision::abs;
  if (is_nonpositive_integer(static_cast<long double>(c))) {
    throw DomainError("2F1: c is a nonpositive integer");
  }
  const Real stop = std::numeric_limits<Real>::epsilon() / 100;
  SeriesSum<Real> out;
  Real sum = 1;
  Real term = 1;
  for (long j = 0; j < max_terms; ++j) {
    const Real ratio = (a + j) * (b + j) / ((c + j) * (j + 1)) * z;
    term *= ratio;
    sum += term;
    if (term == 0) {
      out.value = sum;
      return out;
    }
    const Real rho = abs(ratio) > abs(z) ? Real(abs(ratio)) : Real(abs(z));
    if (abs(ratio) < 1 && rho < 1) {
      const Real tail = abs(term) * rho / (1 - rho);
      if (tail <= stop * abs(sum)) {
        out.value = sum;
        out.tail = tail;
        return out;
      }
    }
  }
  out.value = sum;
  out.tail = abs(term) / (1 - abs(z));
  out.converged = false;
  return out;
}

// prod Gamma(num) / prod Gamma(den); *zero set on a denominator pole.
Quad quad_gamma_ratio(std::initializer_list<Quad> num, std::initializer_list<Quad> den, bool* zero) {
  *zero = false;
  Quad out = 1;
  for (const Quad& x : den) {
    if (is_nonpositive_integer(static_cast<long double>(x))) {
      *zero = true;
      return 0;
    }
    out /= boost::math::tgamma(x);
  }
  for (const Quad& x : num) out *= boost::math::tgamma(x);
  return out;
}

bool near_integer(long double x) { return std::fabs(x - std::nearbyint(x)) < 1e-9L; }

struct Hyp2F1Ld {
  long double value = 0;
  long double error = 0;
  Hyp2F1Method method = Hyp2F1Method::series;
};

// Gamma coefficients of the 1-z connection formula. Evaluations repeat the
// same (a, b, c) many times, so they are memoized per thread.
struct ConnectionCoeffs {
  bool zero_a = false, zero_b = false;
  Quad coef_a = 0, coef_b = 0;
};

const ConnectionCoeffs& connection_coeffs(long double a, long double b, long double c) {
  thread_local std::map<std::tuple<long double, long double, long double>, ConnectionCoeffs> cache;
  const auto key = std::make_tuple(a, b, c);
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  if (cache.size() > 4096) cache.clear();
  ConnectionCoeffs k;
  const Quad qa = a, qb = b, qc = c;
  const Quad qd = qc - qa - qb;
  k.coef_a = quad_gamma_ratio({qc, qd}, {qc - qa, qc - qb}, &k.zero_a);
  k.coef_b = quad_gamma_ratio({qc, -qd}, {qa, qb}, &k.zero_b);
  return cache.emplace(key, k).first->second;
}

// The two branches can cancel heavily when a, b are large; `spread` is
// (|branch A| + |branch B|) / |sum|.
template <typename Real>
struct ConnectionSum {
  Real value = 0;
  Real error = 0;
  Real spread = 1;
};

template <typename Real>
ConnectionSum<Real> connection_sum(const ConnectionCoeffs& k, Real a, Real b, Real c, Real w) {
  using std::abs;
  using std::pow;
  using boost::multiprecision::abs;
  using boost::multiprecision::pow;
  const Real d = c - a - b;
  ConnectionSum<Real> out;
  Real magnitude = 0;
  if (!k.zero_a) {
    const Real coef = static_cast<Real>(k.coef_a);
    const auto s = gauss_series<Real>(a, b, 1 - d, w);
    out.value += coef * s.value;
    out.error += abs(coef) * s.tail;
    magnitude += abs(coef * s.value);
  }
  if (!k.zero_b) {
    const Real scale = pow(w, d) * static_cast<Real>(k.coef_b);
    const auto s = gauss_series<Real>(c - a, c - b, 1 + d, w);
    out.value += scale * s.value;
    out.error += abs(scale) * s.tail;
    magnitude += abs(scale * s.value);
  }
  out.spread = out.value == 0 ? Real(std::numeric_limits<double>::infinity()) : magnitude / abs(out.value);
  return out;
}

// 2F1 with both z and w = 1 - z supplied, so callers near z = 1 keep w exact.
Hyp2F1Ld hyp2f1_ld(long double a, long double b, long double c, long double z, long double w,
                   bool force_connection = false) {
  if (is_nonpositive_integer(c)) throw DomainError("2F1: c is a nonpositive integer");
  Hyp2F1Ld out;
  if (z <= 0.5L && !force_connection) {
    const auto s = gauss_series<long double>(a, b, c, z);
    out.value = s.value;
    out.error = s.tail;
    return out;
  }
  if (near_integer(c - a - b)) {
    const auto s = gauss_series<long double>(a, b, c, z);
    out.value = s.value;
    out.error = s.tail;
    out.method = Hyp2F1Method::degenerate_series;
    return out;
  }
  out.method = Hyp2F1Method::connection;
  const ConnectionCoeffs& coeffs = connection_coeffs(a, b, c);
  const auto fast = connection_sum<long double>(coeffs, a, b, c, w);
  if (fast.spread <= 100) {
    out.value = fast.value;
    out.error = fast.error;
    return out;
  }
  const auto slow = connection_sum<Quad>(coeffs, a, b, c, w);
  out.value = static_cast<long double>(slow.value);
  out.error = static_cast<long double>(slow.error);
  return out;
}

struct PhiArgs {
  long double a, b, c;
  int m;
};

PhiArgs phi_args(const ReprParams& p) {
  const int eps = p.epsilon();
  const int m = std::abs(p.n - p.k);
  return {p.s - eps * p.k, p.s + static_cast<long double>(eps) * p.n, 1.0L + m, m};
}

long double phi_from(const ReprParams& p, long double r, long double z, long double w) {
  const PhiArgs args = phi_args(p);
  const Hyp2F1Ld f = hyp2f1_ld(args.a, args.b, args.c, z, w);
  const long double rm = args.m == 0 ? 1.0L : std::pow(r, static_cast<long double>(args.m));
  return std::pow(w, static_cast<long double>(p.s)) * rm * f.value;
}

template <typename F>
auto first_derivative(const F& f, long double x, long double h) {
  auto d = [&](long double step) {
    return (f(x - 2 * step) - 8.0L * f(x - step) + 8.0L * f(x + step) - f(x + 2 * step)) /
           (12.0L * step);
  };
  return (16.0L * d(h / 2) - d(h)) / 15.0L;
}

template <typename F>
long double second_derivative(const F& f, long double x, long double h) {
  const long double fx = f(x);
  auto d = [&](long double step) {
    return (-f(x - 2 * step) + 16.0L * f(x - step) - 30.0L * fx + 16.0L * f(x + step) -
            f(x + 2 * step)) /
           (12.0L * step * step);
  };
  return (16.0L * d(h / 2) - d(h)) / 15.0L;
}

using Cplx = std::complex<double>;

Cplx complex_derivative(const std::function<Cplx(double)>& f, double x, double h) {
  auto d = [&](double step) {
    return (f(x - 2 * step) - 8.0 * f(x - step) + 8.0 * f(x + step) - f(x + 2 * step)) /
           (12.0 * step);
  };
  return (16.0 * d(h / 2) - d(h)) / 15.0;
}

struct PolarGradient {
  Cplx d_theta1, d_r, d_theta2;
};

PolarGradient gradient(const PolarFunction& f, PolarPoint at, double h) {
  if (at.r <= 2 * h || at.r >= 1 - 2 * h) {
    throw DomainError("ladder operators need 2h < r < 1 - 2h");
  }
  return {complex_derivative([&](double x) { return f(x, at.r, at.theta2); }, at.theta1, h),
          complex_derivative([&](double x) { return f(at.theta1, x, at.theta2); }, at.r, h),
          complex_derivative([&](double x) { return f(at.theta1, at.r, x); }, at.theta2, h)};
}

// Value at x = 0 of the interpolating polynomial through (xs, ys).
Cplx extrapolate_to_zero(std::vector<double> xs, std::vector<Cplx> ys) {
  const std::size_t n = xs.size();
  for (std::size_t level = 1; level < n; ++level) {
    for (std::size_t i = 0; i + level < n; ++i) {
      ys[i] = (xs[i + level] * ys[i] - xs[i] * ys[i + 1]) / (xs[i + level] - xs[i]);
    }
  }
  return ys[0];
}

}  // namespace

double SignedLog::value() const { return sign == 0 ? 0.0 : sign * std::exp(log_abs); }

long double log_gamma_ld(long double x, int* sign) {
  if (is_nonpositive_integer(x)) {
    throw DomainError("log_gamma: pole at nonpositive integer " + std::to_string(static_cast<double>(x)));
  }
  if (!std::isfinite(x)) throw DomainError("log_gamma: non-finite argument");
  if (x < 0.5L) {
    const long double s = sin_pi(x);
    int inner = 1;
    const long double reflected = log_gamma_ld(1.0L - x, &inner);
    *sign = s > 0 ? 1 : -1;
    return std::log(kPiL) - std::log(std::fabs(s)) - reflected;
  }
  *sign = 1;
  long double y = x;
  long double product = 1;
  while (y < 15.0L) {
    product *= y;
    y += 1.0L;
  }
  return stirling(y) - std::log(product);
}

SignedLog log_gamma(double x) {
  int sign = 1;
  const long double v = log_gamma_ld(x, &sign);
  return {static_cast<double>(v), sign};
}

SignedLog log_reciprocal_gamma(double x) {
  if (is_nonpositive_integer(x)) return {0.0, 0};
  const SignedLog g = log_gamma(x);
  return {-g.log_abs, g.sign};
}

SignedLog log_gamma_ratio(std::initializer_list<double> numerator,
                          std::initializer_list<double> denominator) {
  SignedLog out{0.0, 1};
  long double acc = 0;
  for (double x : numerator) {
    int sg = 1;
    acc += log_gamma_ld(x, &sg);
    out.sign *= sg;
  }
  for (double x : denominator) {
    if (is_nonpositive_integer(x)) return {0.0, 0};
    int sg = 1;
    acc -= log_gamma_ld(x, &sg);
    out.sign *= sg;
  }
  out.log_abs = static_cast<double>(acc);
  return out;
}

double gamma_ratio(std::initializer_list<double> numerator, std::initializer_list<double> denominator) {
  return log_gamma_ratio(numerator, denominator).value();
}

Hyp2F1Result hyp2f1_detailed(double a, double b, double c, double z) {
  if (!(z >= 0 && z < 1)) throw DomainError("hyp2f1: z must lie in [0, 1)");
  const long double zl = z;
  const Hyp2F1Ld r = hyp2f1_ld(a, b, c, zl, 1.0L - zl);
  return {static_cast<double>(r.value), r.method, static_cast<double>(r.error)};
}

double hyp2f1(double a, double b, double c, double z) { return hyp2f1_detailed(a, b, c, z).value; }

double hyp2f1_series(double a, double b, double c, double z) {
  if (!(z >= 0 && z < 1)) throw DomainError("hyp2f1: z must lie in [0, 1)");
  return static_cast<double>(gauss_series<long double>(a, b, c, z).value);
}

double hyp2f1_connection(double a, double b, double c, double z) {
  if (!(z >= 0 && z < 1)) throw DomainError("hyp2f1: z must lie in [0, 1)");
  if (near_integer(static_cast<long double>(c) - a - b)) {
    throw DomainError("hyp2f1_connection: c - a - b is an integer");
  }
  const long double zl = z;
  return static_cast<double>(hyp2f1_ld(a, b, c, zl, 1.0L - zl, true).value);
}

void ReprParams::validate() const {
  if (!(s > 0.5 && s < 1)) throw DomainError("complementary series parameter must satisfy 1/2 < s < 1");
}

long double phi_ld(const ReprParams& p, long double r) {
  p.validate();
  if (!(r >= 0 && r < 1)) throw DomainError("phi: r must lie in [0, 1)");
  return phi_from(p, r, r * r, (1.0L - r) * (1.0L + r));
}

double phi(const ReprParams& p, double r) { return static_cast<double>(phi_ld(p, r)); }

double phi_at_t(const ReprParams& p, double t) {
  p.validate();
  if (!(t >= 0)) throw DomainError("phi_at_t: t must be nonnegative");
  const long double e = std::exp(-static_cast<long double>(t));
  const long double r = (1 - e) / (1 + e);
  const long double w = 4 * e / ((1 + e) * (1 + e));
  return static_cast<double>(phi_from(p, r, r * r, w));
}

double phi_asymptotic_constant(const ReprParams& p) {
  p.validate();
  const PhiArgs args = phi_args(p);
  return std::pow(4.0, 1 - p.s) *
         gamma_ratio({1.0 + args.m, 2 * p.s - 1}, {static_cast<double>(args.a),
                                                    static_cast<double>(args.b)});
}

OdeResidual casimir_residual(const std::function<long double(long double)>& f, const ReprParams& p,
                             double r) {
  const long double h = kDerivativeStep;
  const long double x = r;
  if (!(x > 4 * h && x < 1 - 4 * h)) throw DomainError("casimir_residual: r too close to 0 or 1");
  const long double one_minus = (1 - x) * (1 + x);
  const long double f0 = f(x);
  const long double d1 = first_derivative(f, x, h);
  const long double d2 = second_derivative(f, x, h);
  const long double nn = static_cast<long double>(p.n) * p.n + static_cast<long double>(p.k) * p.k;
  const long double nk = static_cast<long double>(p.n) * p.k;
  const long double terms[] = {
      one_minus * one_minus / 4 * d2,
      one_minus * one_minus / (4 * x) * d1,
      -one_minus * one_minus / (4 * x * x) * nn * f0,
      (1 - x * x * x * x) / (2 * x * x) * nk * f0,
      static_cast<long double>(p.s) * (1 - p.s) * f0,
  };
  long double sum = 0;
  long double scale = 0;
  for (long double v : terms) {
    sum += v;
    scale += std::fabs(v);
  }
  return {static_cast<double>(std::fabs(sum)), static_cast<double>(scale)};
}

OdeResidual casimir_residual(const ReprParams& p, double r) {
  p.validate();
  return casimir_residual([&p](long double x) { return phi_ld(p, x); }, p, r);
}

std::complex<double> apply_raising(const PolarFunction& f, PolarPoint at, double h) {
  const PolarGradient g = gradient(f, at, h);
  const double r = at.r;
  const Cplx i(0, 1);
  const Cplx body = -i * ((1 - r * r) / (2 * r)) * g.d_theta1 + (1 - r * r) * g.d_r +
                    i * ((1 + r * r) / (2 * r)) * g.d_theta2;
  return std::polar(1.0, 2 * at.theta2) * body;
}

std::complex<double> apply_lowering(const PolarFunction& f, PolarPoint at, double h) {
  const PolarGradient g = gradient(f, at, h);
  const double r = at.r;
  const Cplx i(0, 1);
  const Cplx body = i * ((1 - r * r) / (2 * r)) * g.d_theta1 + (1 - r * r) * g.d_r -
                    i * ((1 + r * r) / (2 * r)) * g.d_theta2;
  return std::polar(1.0, -2 * at.theta2) * body;
}

PolarFunction raised(PolarFunction f, double h) {
  return [f = std::move(f), h](double t1, double r, double t2) {
    return apply_raising(f, {t1, r, t2}, h);
  };
}

PolarFunction lowered(PolarFunction f, double h) {
  return [f = std::move(f), h](double t1, double r, double t2) {
    return apply_lowering(f, {t1, r, t2}, h);
  };
}

PolarFunction phi_on_group(const ReprParams& p) {
  p.validate();
  return [p](double t1, double r, double t2) {
    return std::polar(phi(p, r), 2.0 * p.n * t1 + 2.0 * p.k * t2);
  };
}

double raising_coefficient(const ReprParams& p) {
  const double n = p.n, k = p.k, s = p.s;
  if (p.n > p.k) return -2.0 * (-(n - k));
  return -2.0 * (s + k) * (1 - s + k) / (1 - n + k);
}

double lowering_coefficient(const ReprParams& p) {
  const double n = p.n, k = p.k, s = p.s;
  if (p.n >= p.k) return -2.0 * (s - k) * (1 - s - k) / (1 + n - k);
  return -2.0 * (-(k - n));
}

double ladder_norm_b(int k, double s) {
  ReprParams{s, 0, 0}.validate();
  if (k < 0) throw DomainError("ladder_norm_b: k must be nonnegative");
  return std::pow(4.0, k) * gamma_ratio({s + k, 1 - s + k}, {s, 1 - s});
}

double intertwine_constant(int k, double s) {
  ReprParams{s, 0, 0}.validate();
  const double parity = (k % 2 == 0) ? 1.0 : -1.0;
  return std::pow(4.0, 1 - s) * kPi * parity * gamma_ratio({2 * s - 1}, {s - k, s + k});
}

double line_model_norm_btilde(int k, double s) { return kPi * intertwine_constant(k, s); }

std::complex<double> line_model_vector(int k, double s, double x) {
  return std::polar(std::pow(1 + x * x, -s), 2.0 * k * std::atan2(-1.0, x));
}

double matrix_coefficient_radial(const ReprParams& p, double r) {
  p.validate();
  const int eps = p.epsilon();
  const int m = std::abs(p.n - p.k);
  const double parity = (p.k % 2 == 0) ? 1.0 : -1.0;
  const double norms = line_model_norm_btilde(p.k, p.s) * line_model_norm_btilde(p.n, p.s);
  const double constant = parity * std::pow(4.0, 1 - p.s) * kPi * kPi *
                          gamma_ratio({2 * p.s - 1}, {1.0 + m, p.s - eps * p.n, p.s + eps * p.k});
  return phi(p, r) * constant / std::sqrt(norms);
}

std::complex<double> matrix_coefficient(const ReprParams& p, const CartanCoords& g) {
  return std::polar(1.0, 2.0 * p.n * g.theta1 + 2.0 * p.k * g.theta2) *
         matrix_coefficient_radial(p, g.r);
}

std::complex<double> FourierModel::coefficient(int n) const {
  const int N = max_n();
  if (n < -N || n > N) return 0.0;
  return coeffs[static_cast<std::size_t>(n + N)];
}

PolarFunction FourierModel::as_function() const {
  return [model = *this](double t1, double r, double) {
    std::complex<double> sum = 0;
    for (int n = -model.max_n(); n <= model.max_n(); ++n) {
      const std::complex<double> c = model.coefficient(n);
      if (c == 0.0) continue;
      sum += c * phi(ReprParams{model.s, n, 0}, r) * std::polar(1.0, 2.0 * n * t1);
    }
    return sum;
  };
}

OriginCheck origin_values_check(const FourierModel& model, int k, double tolerance) {
  constexpr double kStep = 1e-3;
  OriginCheck out;
  out.k = k;
  PolarFunction f = model.as_function();
  for (int j = 0; j < std::abs(k); ++j) f = k > 0 ? raised(f, kStep) : lowered(f, kStep);
  std::vector<double> rs;
  std::vector<Cplx> values;
  for (int i = 1; i <= 8; ++i) {
    const double r = 0.03 * i;
    rs.push_back(r);
    values.push_back(f(0.0, r, 0.0));
  }
  out.numeric = extrapolate_to_zero(rs, values);
  out.expected = model.coefficient(k) * std::pow(2.0, std::abs(k)) * std::tgamma(std::abs(k) + 1.0);
  out.error = std::abs(out.numeric - out.expected);
  out.pass = out.error <= tolerance;
  return out;
}

double tempered_decay_bound(double t, double norm_v, double norm_w) {
  if (t < 0) throw DomainError("tempered_decay_bound: t must be nonnegative");
  return t * std::exp(-t / 2) * norm_v * norm_w;
}

double spectral_gap_decay_bound(double t, double theta, double norm_v, double norm_w,
                                double sobolev_v, double sobolev_w) {
  if (t < 0) throw DomainError("spectral_gap_decay_bound: t must be nonnegative");
  return std::exp(-theta * t) * std::sqrt(norm_v * norm_w) * std::sqrt(sobolev_v * sobolev_w);
}

}  // namespace hyperorbit::specfun
