#include "hyperorbit/sector_count.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "hyperorbit/error.hpp"
#include "hyperorbit/numerics.hpp"

namespace hyperorbit {

namespace {

bool integral(double x) { return x == std::floor(x) && std::fabs(x) < 9.0e15; }

double length(IntVec v) { return std::hypot(static_cast<double>(v.first), static_cast<double>(v.second)); }

// dist < N/K, exactly when N and K are integers; dist given as its square when `squared`.
bool below_ratio(Wide dist, bool squared, double N, double K) {
  if (integral(N) && integral(K) && K > 0) {
    const Wide n = static_cast<Wide>(N);
    const Wide k = static_cast<Wide>(K);
    return squared ? dist * k * k < n * n : dist * k < n;
  }
  const long double bound = static_cast<long double>(N) / K;
  return squared ? static_cast<long double>(dist) < bound * bound : static_cast<long double>(dist) < bound;
}

Wide abs_wide(Wide x) { return x < 0 ? -x : x; }

Int mod(Int x, Int q) {
  const Int r = x % q;
  return r < 0 ? r + q : r;
}

std::string fmt(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

std::complex<double> phase(const OrbitPoint& p, int n, int k) {
  if (p.coords.degenerate) return 1.0;
  return std::polar(1.0, 2.0 * n * p.coords.theta1 + 2.0 * k * p.coords.theta2);
}

}  // namespace

SectorSumRecord sector_sum(const OrbitBall& ball, int n, int k) {
  if (!ball.complete) throw DomainError("sector_sum needs a complete ball");
  std::vector<std::complex<double>> terms;
  terms.reserve(ball.size());
  for (const OrbitPoint& p : ball.elements) terms.push_back(phase(p, n, k));
  return {n, k, ball.T, pairwise_sum(terms), ball.size()};
}

std::vector<SectorSumRecord> growth_scan(const OrbitBall& ball, std::span<const double> T_grid, int n,
                                         int k) {
  if (!ball.complete) throw DomainError("growth_scan needs a complete ball");
  std::vector<SectorSumRecord> out;
  std::vector<std::complex<double>> terms;
  for (double T : T_grid) {
    if (T > ball.T) throw DomainError("growth_scan: grid exceeds the ball radius");
    terms.clear();
    for (const OrbitPoint& p : ball.elements) {
      if (norm_below(frobenius_norm_sq(p.element), T)) terms.push_back(phase(p, n, k));
    }
    out.push_back({n, k, T, pairwise_sum(terms), terms.size()});
  }
  return out;
}

double scale_parameter(const OrbitPoint& p, ScaleMode mode) {
  if (mode == ScaleMode::flow) return std::exp(p.coords.t / 2);
  return std::sqrt(static_cast<double>(frobenius_norm_sq(p.element)));
}

std::size_t sector_indicator_count(const OrbitBall& ball, AngleInterval psi, AngleInterval phi,
                                   double rho_lo, double rho_hi, ScaleMode mode) {
  std::size_t count = 0;
  for (const OrbitPoint& p : ball.elements) {
    const double t1 = p.coords.degenerate ? 0.0 : p.coords.theta1;
    const double t2 = p.coords.degenerate ? 0.0 : p.coords.theta2;
    if (!psi.contains(t1) || !phi.contains(t2)) continue;
    const double rho = scale_parameter(p, mode);
    if (rho > rho_lo && rho < rho_hi) ++count;
  }
  return count;
}

std::vector<std::string> regime_warnings(const AffineQuery& q) {
  std::vector<std::string> w;
  const double ratio = q.N / q.K;
  if (q.mode == QueryMode::lower_bound) {
    const double n = std::fabs(static_cast<double>(q.n_target));
    if (!(ratio < n && n < q.N)) w.push_back("expected N/K < |n| < N, got |n| = " + fmt(n));
    if (!(length(q.w) < q.N / q.T)) w.push_back("expected |w| < N/T, got |w| = " + fmt(length(q.w)));
    if (!(length(q.v) <= q.v_scale)) w.push_back("expected |v| <= " + fmt(q.v_scale) + ", got " + fmt(length(q.v)));
    if (!(n < length(q.v) * length(q.w) * q.T)) w.push_back("expected |n| < |v||w|T");
  } else {
    const double y = length(q.y);
    const double cd = length(q.cd);
    if (!(y < q.N)) w.push_back("expected |y| < N, got |y| = " + fmt(y));
    if (!(cd < q.N / q.T)) w.push_back("expected |(c,d)| < N/T, got " + fmt(cd));
    if (!(y < q.T * cd)) w.push_back("expected |y| < T|(c,d)|");
  }
  if (!(q.K < q.T && q.T < q.N)) w.push_back("expected 0 < K < T < N");
  return w;
}

WindowCount affine_window_count(const OrbitBall& ball, const AffineQuery& query) {
  if (query.mode != QueryMode::lower_bound) throw DomainError("affine_window_count needs lower-bound mode");
  WindowCount out;
  out.warnings = regime_warnings(query);
  const Wide v1 = query.v.first, v2 = query.v.second;
  const Wide w1 = query.w.first, w2 = query.w.second;
  for (const OrbitPoint& p : ball.elements) {
    const GroupElement& g = p.element;
    const Wide row0 = v1 * g.a() + v2 * g.c();
    const Wide row1 = v1 * g.b() + v2 * g.d();
    const Wide value = row0 * w1 + row1 * w2;
    if (below_ratio(abs_wide(value - query.n_target), false, query.N, query.K)) ++out.count;
  }
  return out;
}

WindowCount vector_window_count(const OrbitBall& ball, const AffineQuery& query) {
  if (query.mode != QueryMode::vector_window) throw DomainError("vector_window_count needs vector-window mode");
  if (query.q < 1) throw DomainError("vector_window_count: q must be >= 1");
  WindowCount out;
  out.warnings = regime_warnings(query);
  const auto cells = stabilizer_filter_row(ball, query.q, query.cd);
  const auto cell = cells.find({mod(query.y.first, query.q), mod(query.y.second, query.q)});
  if (cell == cells.end()) return out;
  const Wide c = query.cd.first, d = query.cd.second;
  for (std::size_t i : cell->second) {
    const GroupElement& g = ball.elements[i].element;
    const Wide x = c * g.a() + d * g.c() - query.y.first;
    const Wide y = c * g.b() + d * g.d() - query.y.second;
    if (below_ratio(x * x + y * y, true, query.N, query.K)) ++out.count;
  }
  return out;
}

double normalized_upper_statistic(std::size_t count, double K, Int q, double T, double delta) {
  return static_cast<double>(count) * std::pow(K, 1 + delta) * static_cast<double>(q) * q /
         std::pow(T, 2 * delta);
}

void write_sector_csv(std::span<const SectorSumRecord> records, std::ostream& out) {
  out << std::setprecision(17) << "n,k,T,re,im,raw_count\n";
  for (const SectorSumRecord& r : records) {
    out << r.n << "," << r.k << "," << r.T << "," << r.value.real() << "," << r.value.imag() << ","
        << r.raw_count << "\n";
  }
}

}  // namespace hyperorbit
