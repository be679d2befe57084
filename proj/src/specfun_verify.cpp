#include "hyperorbit/specfun_verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/sinh_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "hyperorbit/specfun.hpp"

namespace hyperorbit::specfun {

namespace {

using Cplx = std::complex<double>;

constexpr double kGridS[] = {0.6, 0.75, 0.9};
constexpr int kGridNK = 5;

double relative_gap(Cplx got, Cplx want) {
  const double scale = std::max(std::abs(got), std::abs(want));
  return scale > 0 ? std::abs(got - want) / scale : 0.0;
}

IdentityCheck finish(IdentityCheck c) {
  c.pass = c.max_error <= c.tolerance;
  return c;
}

// Integral over R of f(y) |y|^{2s-2} for f_{2k,s} shifted by x.
double intertwine_at(int k, double s, double x) {
  boost::math::quadrature::exp_sinh<double> es;
  auto f = [&](double y) { return line_model_vector(k, s, y); };
  auto integrand = [&](double u) {
    if (u <= 0) return 0.0;
    return ((f(x + u) + f(x - u)) * std::pow(u, 2 * s - 2)).real();
  };
  return es.integrate(integrand);
}

// Same integral for general x. The factor f(x - u) peaks near u = x, so the
// half-line is split there: tanh-sinh takes the |u|^{2s-2} endpoint, exp-sinh
// the tail.
Cplx intertwine_at_complex(int k, double s, double x) {
  boost::math::quadrature::tanh_sinh<double> ts;
  boost::math::quadrature::exp_sinh<double> es;
  const double split = 1.0 + std::fabs(x);
  auto f = [&](double y) { return line_model_vector(k, s, y); };
  auto part = [&](bool imag) {
    auto integrand = [&](double u) {
      if (u <= 0) return 0.0;
      const Cplx v = (f(x + u) + f(x - u)) * std::pow(u, 2 * s - 2);
      return imag ? v.imag() : v.real();
    };
    return ts.integrate(integrand, 0.0, split, 1e-13) +
           es.integrate([&](double v) { return integrand(split + v); }, 1e-13);
  };
  return {part(false), part(true)};
}

// Smooth bump supported on (lo, hi).
double bump(double r, double lo, double hi) {
  if (r <= lo || r >= hi) return 0.0;
  return std::exp(-1.0 / ((r - lo) * (hi - r)) + 4.0 / ((hi - lo) * (hi - lo)));
}

}  // namespace

bool VerificationReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const IdentityCheck& c) { return c.pass; });
}

const IdentityCheck* VerificationReport::find(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

nlohmann::json VerificationReport::to_json(bool include_timing) const {
  nlohmann::json out;
  out["schema_version"] = 1;
  out["all_pass"] = all_pass();
  if (include_timing) out["seconds"] = seconds;
  out["identities"] = nlohmann::json::array();
  for (const auto& c : checks) {
    out["identities"].push_back({{"name", c.name},
                                 {"grid", c.grid},
                                 {"max_error", c.max_error},
                                 {"tolerance", c.tolerance},
                                 {"pass", c.pass},
                                 {"details", c.details}});
  }
  return out;
}

IdentityCheck check_casimir_grid() {
  IdentityCheck c{"casimir_ode", "|n|,|k|<=5; s in {0.6,0.75,0.9}; r in {0.1..0.9}", 0, 1e-7};
  for (double s : kGridS) {
    for (int n = -kGridNK; n <= kGridNK; ++n) {
      for (int k = -kGridNK; k <= kGridNK; ++k) {
        for (int i = 1; i <= 9; ++i) {
          c.max_error = std::max(c.max_error, casimir_residual(ReprParams{s, n, k}, 0.1 * i).relative());
        }
      }
    }
  }
  return finish(c);
}

IdentityCheck check_ladder_grid() {
  IdentityCheck c{"ladder_lemma", "|n|,|k|<=5; s in {0.6,0.75,0.9}; r in {0.1..0.9}", 0, 1e-6};
  const PolarPoint base{0.3, 0.5, 0.7};
  double worst_r = 0;
  double worst_l = 0;
  for (double s : kGridS) {
    for (int n = -kGridNK; n <= kGridNK; ++n) {
      for (int k = -kGridNK; k <= kGridNK; ++k) {
        const ReprParams p{s, n, k};
        const PolarFunction f = phi_on_group(p);
        const PolarFunction up = phi_on_group({s, n, k + 1});
        const PolarFunction down = phi_on_group({s, n, k - 1});
        for (int i = 1; i <= 9; ++i) {
          PolarPoint at = base;
          at.r = 0.1 * i;
          worst_r = std::max(worst_r, relative_gap(apply_raising(f, at),
                                                   raising_coefficient(p) * up(at.theta1, at.r, at.theta2)));
          worst_l = std::max(worst_l, relative_gap(apply_lowering(f, at),
                                                   lowering_coefficient(p) * down(at.theta1, at.r, at.theta2)));
        }
      }
    }
  }
  c.details = {{"raising", worst_r}, {"lowering", worst_l}};
  c.max_error = std::max(worst_r, worst_l);
  return finish(c);
}

IdentityCheck check_lowering_raising() {
  IdentityCheck c{"lowering_after_raising", "|n|,|k|<=3; s in {0.6,0.75,0.9}; r in {0.2,0.5,0.8}", 0, 1e-5};
  constexpr double kStep = 1e-3;
  for (double s : kGridS) {
    for (int n = -3; n <= 3; ++n) {
      for (int k = -3; k <= 3; ++k) {
        const ReprParams p{s, n, k};
        const PolarFunction f = phi_on_group(p);
        const PolarFunction lr = lowered(raised(f, kStep), kStep);
        for (double r : {0.2, 0.5, 0.8}) {
          const Cplx want = -4.0 * (s + k) * (1 - s + k) * f(0.3, r, 0.7);
          c.max_error = std::max(c.max_error, relative_gap(lr(0.3, r, 0.7), want));
        }
      }
    }
  }
  return finish(c);
}

IdentityCheck check_connection_overlap() {
  IdentityCheck c{"connection_overlap", "Phi parameters, |n|,|k|<=5, s grid; z in [0.4,0.6]", 0, 1e-10};
  for (double s : kGridS) {
    for (int n = -kGridNK; n <= kGridNK; ++n) {
      for (int k = -kGridNK; k <= kGridNK; ++k) {
        const int eps = n >= k ? 1 : -1;
        const double a = s - eps * k;
        const double b = s + eps * n;
        const double cc = 1.0 + std::abs(n - k);
        for (int i = 0; i <= 10; ++i) {
          const double z = 0.4 + 0.02 * i;
          const double series = hyp2f1_series(a, b, cc, z);
          const double conn = hyp2f1_connection(a, b, cc, z);
          const double scale = std::max({std::fabs(series), std::fabs(conn), 1e-300});
          c.max_error = std::max(c.max_error, std::fabs(series - conn) / scale);
        }
      }
    }
  }
  return finish(c);
}

IdentityCheck check_asymptotic_constant(double tolerance, double max_slope) {
  struct Case {
    int n, k;
    double s;
  };
  static constexpr Case kCases[] = {{0, 0, 0.6},  {1, 0, 0.6},  {0, 1, 0.6},   {2, -1, 0.75},
                                    {1, 1, 0.75}, {-2, 1, 0.75}, {3, 0, 0.9},  {0, -3, 0.9},
                                    {2, 2, 0.9},  {-1, -4, 0.9}};
  IdentityCheck c{"asymptotic_constant", "10 cases (n,k,s); t = 20; slope over t in {10,12,...,20}", 0,
                  tolerance};
  c.details["cases"] = nlohmann::json::array();
  double worst_slope = -1e300;
  for (const Case& cs : kCases) {
    const ReprParams p{cs.s, cs.n, cs.k};
    const double limit = phi_asymptotic_constant(p);
    std::vector<double> ts;
    std::vector<double> logs;
    double err20 = 0;
    for (int t = 10; t <= 20; t += 2) {
      const double scaled = std::exp(t * (1 - cs.s)) * phi_at_t(p, t);
      const double err = std::fabs(scaled - limit) / std::fabs(limit);
      ts.push_back(t);
      logs.push_back(std::log(std::max(err, 1e-300)));
      if (t == 20) err20 = err;
    }
    const double mt = 15.0;
    double my = 0;
    for (double v : logs) my += v;
    my /= static_cast<double>(logs.size());
    double sxy = 0;
    double sxx = 0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
      sxy += (ts[i] - mt) * (logs[i] - my);
      sxx += (ts[i] - mt) * (ts[i] - mt);
    }
    const double slope = sxy / sxx;
    c.details["cases"].push_back({{"n", cs.n},
                                  {"k", cs.k},
                                  {"s", cs.s},
                                  {"limit", limit},
                                  {"relative_error_t20", err20},
                                  {"error_log_slope", slope}});
    c.max_error = std::max(c.max_error, err20);
    worst_slope = std::max(worst_slope, slope);
  }
  c.details["worst_slope"] = worst_slope;
  c.details["slope_bound"] = max_slope;
  c.pass = c.max_error <= tolerance && worst_slope <= max_slope;
  return c;
}

IdentityCheck check_intertwine_quadrature(double tolerance) {
  IdentityCheck c{"intertwine_constant", "|k|<=4; s in {0.6,0.75}; x in {0, 0.7}", 0, tolerance};
  for (double s : {0.6, 0.75}) {
    for (int k = -4; k <= 4; ++k) {
      const double want = intertwine_constant(k, s);
      // I f_{2k,s}(0) = C f_{2k,1-s}(0) = C (-1)^k.
      const double at0 = intertwine_at(k, s, 0.0);
      c.max_error = std::max(c.max_error, std::fabs(at0 - want * ((k % 2 == 0) ? 1 : -1)) / std::fabs(want));
      const Cplx at07 = intertwine_at_complex(k, s, 0.7);
      const Cplx target = want * line_model_vector(k, 1 - s, 0.7);
      c.max_error = std::max(c.max_error, std::abs(at07 - target) / std::abs(target));
    }
  }
  return finish(c);
}

IdentityCheck check_btilde_pairing(double tolerance) {
  IdentityCheck c{"line_model_norm", "pairing integral k in {0,2}, s = 0.7; positivity |k|<=10", 0, tolerance};
  boost::math::quadrature::sinh_sinh<double> ss;
  for (int k : {0, 2}) {
    const double s = 0.7;
    auto integrand = [&](double x) {
      return (line_model_vector(k, s, x) * std::conj(intertwine_at_complex(k, s, x))).real();
    };
    const double pairing = ss.integrate(integrand, 1e-11);
    const double want = line_model_norm_btilde(k, s);
    c.max_error = std::max(c.max_error, std::fabs(pairing - want) / want);
    c.details["pairing_k" + std::to_string(k)] = pairing;
  }
  bool positive = true;
  for (double s : kGridS) {
    for (int k = -10; k <= 10; ++k) positive = positive && line_model_norm_btilde(k, s) > 0;
  }
  c.details["all_positive"] = positive;
  c.pass = c.max_error <= tolerance && positive;
  return c;
}

IdentityCheck check_adjoint(double tolerance) {
  IdentityCheck c{"adjoint", "bump test functions, K-types (a,b), (a,b+1) with |a|,|b|<=1", 0, tolerance};
  // R v and w share a K-type, so the integrand is constant in the angles;
  // two angle samples confirm that and give the average.
  constexpr int kAngles = 2;
  for (int a = -1; a <= 1; ++a) {
    for (int b = -1; b <= 1; ++b) {
      const PolarFunction v = [a, b](double t1, double r, double t2) {
        return bump(r, 0.15, 0.75) * (1 + r) * std::polar(1.0, 2.0 * a * t1 + 2.0 * b * t2);
      };
      const PolarFunction w = [a, b](double t1, double r, double t2) {
        return bump(r, 0.25, 0.85) * (2 - r * r) * std::polar(1.0, 2.0 * a * t1 + 2.0 * (b + 1) * t2);
      };
      auto pair = [&](const PolarFunction& left, const PolarFunction& right, bool apply_left) {
        auto radial = [&](double r, bool imag) {
          if (r <= 0.1 || r >= 0.9) return 0.0;
          Cplx sum = 0;
          for (int i = 0; i < kAngles; ++i) {
            for (int j = 0; j < kAngles; ++j) {
              const PolarPoint at{0.4 + 1.1 * i, r, 0.2 + 0.9 * j};
              const Cplx lv = apply_left ? apply_raising(left, at) : left(at.theta1, r, at.theta2);
              const Cplx rv = apply_left ? right(at.theta1, r, at.theta2) : apply_lowering(right, at);
              sum += lv * std::conj(rv);
            }
          }
          const Cplx val = sum * (4 * r / ((1 - r * r) * (1 - r * r))) / double(kAngles * kAngles);
          return imag ? val.imag() : val.real();
        };
        // Composite Gauss-Legendre; the bumps are smooth, so panels converge fast.
        constexpr int kPanels = 32;
        Cplx total = 0;
        for (int p = 0; p < kPanels; ++p) {
          const double lo = 0.1 + 0.8 * p / kPanels;
          const double hi = 0.1 + 0.8 * (p + 1) / kPanels;
          total += Cplx(boost::math::quadrature::gauss<double, 20>::integrate(
                            [&](double r) { return radial(r, false); }, lo, hi),
                        boost::math::quadrature::gauss<double, 20>::integrate(
                            [&](double r) { return radial(r, true); }, lo, hi));
        }
        return total;
      };
      const Cplx lhs = pair(v, w, true);
      const Cplx rhs = -pair(v, w, false);
      const double scale = std::max(std::abs(lhs), 1e-12);
      c.max_error = std::max(c.max_error, std::abs(lhs - rhs) / scale);
    }
  }
  return finish(c);
}

IdentityCheck check_unitarity() {
  IdentityCheck c{"unitarity", "|n|,|k|<=5; s grid; t in [0,10] step 0.05", 0, 1e-12};
  double diag = 0;
  for (double s : kGridS) {
    for (int n = -kGridNK; n <= kGridNK; ++n) {
      for (int k = -kGridNK; k <= kGridNK; ++k) {
        const ReprParams p{s, n, k};
        for (int i = 0; i <= 200; ++i) {
          const double r = std::tanh(0.05 * i / 2);
          const double m = matrix_coefficient_radial(p, r);
          c.max_error = std::max(c.max_error, std::fabs(m) - 1.0);
          if (n == k) diag = std::max(diag, std::fabs(m - phi(p, r)));
        }
      }
    }
  }
  c.details["diagonal_vs_phi"] = diag;
  c.pass = c.max_error <= c.tolerance && diag <= 1e-12;
  return c;
}

VerificationReport run_identity_suite() {
  const auto start = std::chrono::steady_clock::now();
  VerificationReport report;
  report.checks.push_back(check_casimir_grid());
  report.checks.push_back(check_ladder_grid());
  report.checks.push_back(check_lowering_raising());
  report.checks.push_back(check_connection_overlap());
  report.checks.push_back(check_asymptotic_constant());
  report.checks.push_back(check_intertwine_quadrature());
  report.checks.push_back(check_btilde_pairing());
  report.checks.push_back(check_adjoint());
  report.checks.push_back(check_unitarity());
  report.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace hyperorbit::specfun
