#include "hyperorbit/ps_measure.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

#include "hyperorbit/error.hpp"
#include "hyperorbit/numerics.hpp"
#include "hyperorbit/specfun.hpp"

namespace hyperorbit {

namespace {

constexpr int kShells = 16;
constexpr double kLn10 = 2.302585092994046;

double T_from_t(double t) { return std::sqrt(2 * std::cosh(t)); }

struct ShellFit {
  double exponent = 0;
  double stderr_ = 0;
  double r_squared = 0;
  bool ok = false;
};

// Fit log(sum over shell of e^{-s t}) against shell centre.
ShellFit shell_exponent(const std::vector<double>& ts, double t_lo, double t_hi, double s) {
  const double width = (t_hi - t_lo) / kShells;
  std::vector<std::vector<double>> terms(kShells);
  for (double t : ts) {
    if (t < t_lo || t >= t_hi) continue;
    const int j = std::min(kShells - 1, static_cast<int>((t - t_lo) / width));
    terms[j].push_back(std::exp(-s * (t - t_lo)));
  }
  std::vector<double> x;
  std::vector<double> y;
  for (int j = 0; j < kShells; ++j) {
    if (terms[j].empty()) continue;
    x.push_back(t_lo + (j + 0.5) * width);
    y.push_back(std::log(pairwise_sum(terms[j])) - s * t_lo);
  }
  ShellFit out;
  if (x.size() < 4) return out;
  const LineFit fit = fit_line(x, y);
  out.exponent = fit.slope;
  out.stderr_ = fit.slope_stderr;
  out.r_squared = fit.r_squared;
  out.ok = true;
  return out;
}

}  // namespace

double BoundaryMeasure::total_mass() const {
  std::vector<double> w;
  w.reserve(atoms.size());
  for (const Atom& a : atoms) w.push_back(a.weight);
  return pairwise_sum(w);
}

std::string to_string(ExponentMethod m) {
  return m == ExponentMethod::count_fit ? "count-fit" : "poincare-abscissa";
}

ExponentEstimate estimate_delta_countfit(std::span<const GrowthPoint> counts) {
  if (counts.size() < 5) throw DomainError("count fit needs at least 5 grid points");
  std::vector<double> x;
  std::vector<double> y;
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0;
  for (const GrowthPoint& p : counts) {
    if (p.T <= 0 || p.count == 0) throw DomainError("count fit needs positive T and N(T)");
    x.push_back(std::log(p.T));
    y.push_back(std::log(static_cast<double>(p.count)));
    lo = std::min(lo, p.T);
    hi = std::max(hi, p.T);
  }
  if (hi / lo < 100 * (1 - 1e-12)) throw DomainError("count fit grid must span at least 2 decades");
  const LineFit fit = fit_line(x, y);
  ExponentEstimate e;
  e.delta_hat = fit.slope / 2;
  e.stderr_ = fit.slope_stderr / 2;
  e.method = ExponentMethod::count_fit;
  e.T_range = {lo, hi};
  e.r_squared = fit.r_squared;
  return e;
}

double t_from_frobenius(double T) { return std::acosh(std::max(1.0, T * T / 2)); }

ExponentEstimate estimate_delta_poincare(std::span<const double> t_values, double t_max) {
  const double t_lo = std::max(0.0, t_max - 4 * kLn10);
  const std::vector<double> ts(t_values.begin(), t_values.end());
  ExponentEstimate e;
  e.method = ExponentMethod::poincare_abscissa;
  e.T_range = {T_from_t(t_lo), T_from_t(t_max)};
  const ShellFit at_zero = shell_exponent(ts, t_lo, t_max, 0.0);
  if (!at_zero.ok) throw DomainError("Poincare abscissa: too few populated shells");
  if (at_zero.exponent <= 1e-12) {
    e.delta_hat = 0;
    e.stderr_ = at_zero.stderr_;
    e.r_squared = at_zero.r_squared;
    return e;
  }
  double lo = 0;
  double hi = 1;
  if (shell_exponent(ts, t_lo, t_max, hi).exponent > 0) {
    lo = hi = 1;
  }
  while (hi - lo > 1e-10) {
    const double mid = (lo + hi) / 2;
    (shell_exponent(ts, t_lo, t_max, mid).exponent > 0 ? lo : hi) = mid;
  }
  const ShellFit root = shell_exponent(ts, t_lo, t_max, hi);
  e.delta_hat = hi;
  e.stderr_ = root.stderr_;
  // The fit at the root is flat, so its r^2 carries no information.
  e.r_squared = at_zero.r_squared;
  return e;
}

ExponentEstimate estimate_delta_poincare(const OrbitBall& ball) {
  if (!ball.complete) throw DomainError("Poincare abscissa needs a complete ball");
  std::vector<double> ts;
  ts.reserve(ball.size());
  for (const OrbitPoint& p : ball.elements) ts.push_back(p.coords.t);
  return estimate_delta_poincare(ts, t_from_frobenius(ball.T));
}

double default_s(double delta_hat, double T_max) { return delta_hat + 1.0 / std::log(T_max); }

BoundaryMeasure build_measure(std::span<const double> angles, std::span<const double> t_values,
                              double s, double T, const MeasureOptions& options) {
  if (angles.size() != t_values.size()) throw DomainError("build_measure: angle/t size mismatch");
  BoundaryMeasure m;
  m.s_used = s;
  m.T_used = T;
  m.delta_hat = options.delta_hat;
  if (s <= options.delta_hat) {
    m.warnings.push_back("s <= delta_hat: series divergent, truncation dominates");
  }
  double t_ref = std::numeric_limits<double>::infinity();
  for (double t : t_values) {
    if (t >= options.min_t) t_ref = std::min(t_ref, t);
  }
  std::vector<Atom> raw;
  for (std::size_t i = 0; i < angles.size(); ++i) {
    if (t_values[i] < options.min_t) continue;
    raw.push_back({angles[i], std::exp(-s * (t_values[i] - t_ref))});
  }
  if (raw.empty()) {
    m.warnings.push_back("no boundary atoms");
    return m;
  }
  std::sort(raw.begin(), raw.end(), [](const Atom& a, const Atom& b) {
    return a.angle < b.angle || (a.angle == b.angle && a.weight < b.weight);
  });
  std::vector<double> group;
  for (std::size_t i = 0; i < raw.size();) {
    group.clear();
    std::size_t j = i;
    while (j < raw.size() && raw[j].angle == raw[i].angle) group.push_back(raw[j++].weight);
    m.atoms.push_back({raw[i].angle, pairwise_sum(group)});
    i = j;
  }
  const double total = m.total_mass();
  for (Atom& a : m.atoms) a.weight /= total;
  m.normalized = true;
  m.empty = false;
  return m;
}

BoundaryMeasure build_measure(const OrbitBall& ball, double s, const MeasureOptions& options) {
  std::vector<double> angles;
  std::vector<double> ts;
  for (const OrbitPoint& p : ball.elements) {
    if (p.coords.degenerate) continue;
    angles.push_back(p.coords.theta1);
    ts.push_back(p.coords.t);
  }
  return build_measure(angles, ts, s, ball.T, options);
}

std::complex<double> fourier_coefficient(const BoundaryMeasure& m, int n) {
  std::vector<std::complex<double>> terms;
  terms.reserve(m.atoms.size());
  for (const Atom& a : m.atoms) terms.push_back(std::polar(a.weight, 2.0 * n * a.angle));
  return pairwise_sum(terms);
}

std::complex<double> c2n_from_coefficient(std::complex<double> mu_hat_minus_2n, int n, double delta) {
  if (!(delta > 0.5 && delta < 1)) throw DomainError("c2n: delta must lie in (1/2, 1)");
  const double m = std::abs(n);
  return specfun::gamma_ratio({delta + m}, {delta, 1 + m}) * mu_hat_minus_2n;
}

std::complex<double> c2n_from_mu(const BoundaryMeasure& m, int n, double delta) {
  return c2n_from_coefficient(fourier_coefficient(m, -n), n, delta);
}

double arc_mass(const BoundaryMeasure& m, double lo, double hi) {
  std::vector<double> w;
  for (const Atom& a : m.atoms) {
    const bool inside = lo <= hi ? (a.angle >= lo && a.angle <= hi) : (a.angle >= lo || a.angle <= hi);
    if (inside) w.push_back(a.weight);
  }
  return pairwise_sum(w);
}

std::vector<std::pair<double, double>> forbidden_arcs(const GroupPresentation& group) {
  std::vector<std::pair<double, double>> arcs;
  if (!group.freeness_certificate) return arcs;
  for (const auto& [x0, x1] : group.freeness_certificate->free_intervals) {
    const double a = boundary_angle(x0);
    const double b = boundary_angle(x1);
    arcs.emplace_back(std::min(a, b), std::max(a, b));
  }
  return arcs;
}

void write_measure_csv(const BoundaryMeasure& m, std::ostream& out) {
  out << std::setprecision(17);
  out << "# s_used=" << m.s_used << "\n# T_used=" << m.T_used << "\n# delta_hat=" << m.delta_hat << "\n";
  out << "angle,weight\n";
  for (const Atom& a : m.atoms) out << a.angle << "," << a.weight << "\n";
}

}  // namespace hyperorbit
