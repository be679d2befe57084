#include "hyperorbit/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>

#include "hyperorbit/error.hpp"
#include "hyperorbit/numerics.hpp"
#include "hyperorbit/specfun.hpp"
#include "hyperorbit/specfun_verify.hpp"

namespace hyperorbit {

namespace {

using nlohmann::json;

constexpr int kSchemaVersion = 1;

[[noreturn]] void config_fail(const std::string& key, const std::string& what) {
  throw ConfigError("config key '" + key + "': " + what);
}

template <typename T>
T get(const json& node, const std::string& key) {
  if (!node.contains(key)) config_fail(key, "missing");
  try {
    return node.at(key).get<T>();
  } catch (const json::exception& e) {
    config_fail(key, e.what());
  }
}

template <typename T>
T get_or(const json& node, const std::string& key, T fallback) {
  return node.contains(key) ? get<T>(node, key) : fallback;
}

IntVec get_pair(const json& node, const std::string& key) {
  const auto v = get<std::vector<Int>>(node, key);
  if (v.size() != 2) config_fail(key, "expected two integers");
  return {v[0], v[1]};
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << std::setprecision(17);
  return out;
}

void write_json(const std::filesystem::path& path, const json& doc) {
  auto out = open_out(path);
  out << doc.dump(2) << "\n";
}

OrbitBall restrict_ball(const OrbitBall& ball, double T) {
  OrbitBall out;
  out.group = ball.group;
  out.T = T;
  out.complete = ball.complete;
  for (const OrbitPoint& p : ball.elements) {
    if (norm_below(frobenius_norm_sq(p.element), T)) out.elements.push_back(p);
  }
  return out;
}

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& p : parts) out += (out.empty() ? "" : "; ") + p;
  return out;
}

}  // namespace

FitResult fit_power_law(std::span<const std::pair<double, double>> records) {
  if (records.size() < 5) throw DomainError("fit_power_law needs at least 5 points");
  std::vector<double> x;
  std::vector<double> y;
  double lo = records.front().first;
  double hi = lo;
  for (const auto& [T, value] : records) {
    if (!(T > 0) || !(value > 0)) throw DomainError("fit_power_law needs positive T and values");
    x.push_back(std::log(T));
    y.push_back(std::log(value));
    lo = std::min(lo, T);
    hi = std::max(hi, T);
  }
  const LineFit fit = fit_line(x, y);
  if (!std::isfinite(fit.slope)) throw DomainError("fit_power_law: non-finite exponent");
  return {fit.slope, std::exp(fit.intercept), fit.residuals, {lo, hi}, fit.r_squared};
}

double ExperimentConfig::T_max() const {
  return T_grid.empty() ? 0.0 : *std::max_element(T_grid.begin(), T_grid.end());
}

ExperimentConfig parse_config(const json& doc) {
  ExperimentConfig cfg;
  if (get_or<int>(doc, "schema_version", kSchemaVersion) != kSchemaVersion) {
    config_fail("schema_version", "unsupported");
  }
  const json group = get<json>(doc, "group");
  if (group.contains("c")) {
    const int c = get<int>(group, "c");
    if (c < 3) config_fail("group.c", "must be >= 3");
    cfg.group = gamma_c(c);
    cfg.ramification = c;
  } else {
    cfg.group.label = get<std::string>(group, "label");
    for (const auto& g : get<std::vector<std::vector<Int>>>(group, "generators")) {
      if (g.size() != 4) config_fail("group.generators", "each generator needs 4 entries");
      try {
        cfg.group.generators.emplace_back(g[0], g[1], g[2], g[3]);
      } catch (const Error& e) {
        config_fail("group.generators", e.what());
      }
    }
    if (cfg.group.generators.empty()) config_fail("group.generators", "empty");
  }
  if (group.contains("label")) cfg.group.label = get<std::string>(group, "label");
  cfg.ramification = get_or<Int>(group, "ramification", cfg.ramification);
  if (cfg.ramification < 1) config_fail("group.ramification", "must be >= 1");
  try {
    cfg.group.validate();
  } catch (const Error& e) {
    config_fail("group", e.what());
  }

  cfg.T_grid = get<std::vector<double>>(doc, "T_grid");
  if (cfg.T_grid.size() < 5) config_fail("T_grid", "needs at least 5 values");
  for (double T : cfg.T_grid) {
    if (!(T > 1)) config_fail("T_grid", "values must exceed 1");
  }
  std::sort(cfg.T_grid.begin(), cfg.T_grid.end());

  for (const auto& h : get_or<std::vector<std::vector<int>>>(doc, "harmonics", {})) {
    if (h.size() != 2) config_fail("harmonics", "expected [n, k] pairs");
    cfg.harmonics.emplace_back(h[0], h[1]);
  }

  if (doc.contains("ps")) {
    const json ps = get<json>(doc, "ps");
    if (ps.contains("s_offset") && !ps.at("s_offset").is_null()) {
      cfg.s_offset = get<double>(ps, "s_offset");
      if (!(*cfg.s_offset > 0)) config_fail("ps.s_offset", "must be positive");
    }
    cfg.mu_max_n = get_or<int>(ps, "max_n", cfg.mu_max_n);
    if (cfg.mu_max_n < 0) config_fail("ps.max_n", "must be >= 0");
  }

  for (const json& block : get_or<std::vector<json>>(doc, "affine", {})) {
    AffineBlock b;
    const auto mode = get<std::string>(block, "mode");
    if (mode == "lower_bound") {
      b.mode = QueryMode::lower_bound;
      b.v = get_pair(block, "v");
      b.w = get_pair(block, "w");
      b.n_target = get<Int>(block, "n");
    } else if (mode == "vector_window") {
      b.mode = QueryMode::vector_window;
      b.cd = get_pair(block, "cd");
      b.y = get_pair(block, "y");
      b.q = get<std::vector<Int>>(block, "q");
      if (b.cd == IntVec{0, 0}) config_fail("affine.cd", "must be nonzero");
    } else {
      config_fail("affine.mode", "expected lower_bound or vector_window");
    }
    b.K = get<std::vector<double>>(block, "K");
    b.N = get<double>(block, "N");
    b.T = get<double>(block, "T");
    for (Int q : b.q) {
      if (q < 1) config_fail("affine.q", "moduli must be >= 1");
    }
    for (double K : b.K) {
      if (!(K > 0)) config_fail("affine.K", "must be positive");
    }
    if (b.T > cfg.T_max()) config_fail("affine.T", "exceeds the largest T in T_grid");
    cfg.affine.push_back(b);
  }

  if (doc.contains("congruence")) {
    const json cong = get<json>(doc, "congruence");
    cfg.moduli = get<std::vector<Int>>(cong, "moduli");
    for (Int q : cfg.moduli) {
      if (q < 1) config_fail("congruence.moduli", "moduli must be >= 1");
    }
    cfg.coset_T = get_or<double>(cong, "T", 0.0);
    if (cfg.coset_T > cfg.T_max()) config_fail("congruence.T", "exceeds the largest T in T_grid");
  }

  cfg.run_specfun = get_or<bool>(doc, "specfun", false);
  if (doc.contains("assertions")) {
    const json a = get<json>(doc, "assertions");
    if (a.contains("delta_agreement")) cfg.assertions.delta_agreement = get<double>(a, "delta_agreement");
    if (a.contains("ratio_error")) cfg.assertions.ratio_error = get<double>(a, "ratio_error");
    if (a.contains("coset_sigma")) cfg.assertions.coset_sigma = get<double>(a, "coset_sigma");
    cfg.assertions.specfun = get_or<bool>(a, "specfun", false);
  }
  cfg.output_dir = get_or<std::string>(doc, "output_dir", "out");
  cfg.seed = get_or<std::uint64_t>(doc, "seed", 1);
  cfg.threads = get_or<int>(doc, "threads", 1);
  if (cfg.threads < 1) config_fail("threads", "must be >= 1");
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_config(doc);
}

std::vector<RatioRow> compare_ratios(std::span<const SectorSumRecord> sectors, const BoundaryMeasure& mu,
                                     double delta) {
  const auto base = std::find_if(sectors.begin(), sectors.end(),
                                 [](const SectorSumRecord& r) { return r.n == 0 && r.k == 0; });
  if (base == sectors.end()) throw DomainError("compare_ratios needs the (0,0) sector sum");
  const std::complex<double> mu0 = fourier_coefficient(mu, 0);
  const double constant = std::sqrt(kPi) * specfun::gamma_ratio({delta - 0.5}, {delta + 1});
  const double scale = std::pow(base->T, 2 * delta);
  std::vector<RatioRow> rows;
  for (const SectorSumRecord& r : sectors) {
    RatioRow row;
    row.n = r.n;
    row.k = r.k;
    row.empirical = r.value / base->value;
    const std::complex<double> product = fourier_coefficient(mu, r.n) * fourier_coefficient(mu, r.k);
    row.predicted = product / (mu0 * mu0);
    row.abs_error = std::abs(row.empirical - row.predicted);
    row.constant_predicted = constant * product;
    row.constant_empirical = r.value / scale;
    rows.push_back(row);
  }
  return rows;
}

bool ExperimentResult::all_pass() const {
  return std::all_of(assertions.begin(), assertions.end(), [](const AssertionOutcome& a) { return a.pass; });
}

OrbitBall acquire_ball(const GroupPresentation& group, double T, const RunOptions& options, bool* cache_hit) {
  EnumerateOptions enum_opts;
  enum_opts.threads = options.threads.value_or(1);
  OrbitBall ball;
  bool hit = false;
  if (options.cache_dir) {
    OrbitCache cache(*options.cache_dir);
    ball = cache.fetch(group, T, enum_opts);
    hit = cache.last_fetch_was_hit();
  } else {
    ball = enumerate_ball(group, T, enum_opts);
  }
  if (!ball.complete) throw DomainError("enumeration incomplete at T = " + std::to_string(T));
  if (cache_hit) *cache_hit = hit;
  return ball;
}

ExperimentResult run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  const std::filesystem::path dir = options.output_dir.value_or(config.output_dir);
  std::filesystem::create_directories(dir);
  const double T_max = config.T_max();
  bool cache_hit = false;
  RunOptions run = options;
  if (!run.threads) run.threads = config.threads;
  const OrbitBall ball = acquire_ball(config.group, T_max, run, &cache_hit);

  const auto want = [&](unsigned section) { return (options.sections & section) != 0; };
  ExperimentResult result;
  json summary;
  summary["schema_version"] = kSchemaVersion;
  summary["group"] = config.group.label;
  summary["T_max"] = T_max;
  summary["ball_size"] = ball.size();
  summary["cache_hit"] = cache_hit;

  // Growth and exponents.
  const auto growth = count_growth(ball, config.T_grid);
  {
    auto out = open_out(dir / "growth.csv");
    out << "T,count\n";
    for (const auto& g : growth) out << g.T << "," << g.count << "\n";
  }
  const ExponentEstimate countfit = estimate_delta_countfit(growth);
  const ExponentEstimate poincare = estimate_delta_poincare(ball);
  auto estimate_json = [](const ExponentEstimate& e) {
    return json{{"method", to_string(e.method)},
                {"delta_hat", e.delta_hat},
                {"stderr", e.stderr_},
                {"T_range", {e.T_range.first, e.T_range.second}},
                {"r_squared", e.r_squared}};
  };
  write_json(dir / "exponents.json", {{"count_fit", estimate_json(countfit)},
                                      {"poincare_abscissa", estimate_json(poincare)}});
  summary["delta_countfit"] = countfit.delta_hat;
  summary["delta_poincare"] = poincare.delta_hat;
  const double delta = countfit.delta_hat;
  {
    // Decade windows [10^3, 10^4] and [10^4, 10^5]; a gap >= 0.03 is flagged.
    std::vector<double> halves;
    for (double lo : {1e3, 1e4}) {
      std::vector<std::pair<double, double>> pts;
      for (const auto& g : growth) {
        if (g.T >= lo && g.T <= 10 * lo && g.count > 0) pts.emplace_back(g.T, static_cast<double>(g.count));
      }
      if (pts.size() >= 5) halves.push_back(fit_power_law(pts).exponent / 2);
    }
    if (halves.size() == 2) {
      const double gap = std::fabs(halves[0] - halves[1]);
      summary["fit_stability"] = {{"delta_1e3_1e4", halves[0]},
                                  {"delta_1e4_1e5", halves[1]},
                                  {"difference", gap},
                                  {"flagged", gap >= 0.03}};
    }
  }
  if (config.assertions.delta_agreement) {
    const double gap = std::fabs(countfit.delta_hat - poincare.delta_hat);
    std::ostringstream os;
    os << "|" << countfit.delta_hat << " - " << poincare.delta_hat << "| = " << gap;
    result.assertions.push_back(
        {"delta_agreement", gap <= *config.assertions.delta_agreement && delta > 0.5 && poincare.delta_hat > 0.5,
         os.str()});
  }

  // Boundary measure.
  const double s = delta + config.s_offset.value_or(1.0 / std::log(T_max));
  MeasureOptions mopts;
  mopts.delta_hat = delta;
  const BoundaryMeasure measure = build_measure(ball, s, mopts);
  if (want(kMeasureSection)) {
    auto out = open_out(dir / "measure.csv");
    write_measure_csv(measure, out);
  }
  if (want(kMeasureSection)) {
    auto out = open_out(dir / "mu.csv");
    out << "n,re,im,c2n_re,c2n_im\n";
    const bool c2n_ok = delta > 0.5 && delta < 1;
    for (int n = -config.mu_max_n; n <= config.mu_max_n; ++n) {
      const auto m = fourier_coefficient(measure, n);
      const auto c = c2n_ok ? c2n_from_mu(measure, n, delta) : std::complex<double>(NAN, NAN);
      out << n << "," << m.real() << "," << m.imag() << "," << c.real() << "," << c.imag() << "\n";
    }
  }
  summary["s_used"] = s;
  summary["measure_warnings"] = measure.warnings;

  // Sector sums and ratio comparison.
  std::vector<std::pair<int, int>> harmonics = {{0, 0}};
  for (const auto& h : config.harmonics) {
    if (std::find(harmonics.begin(), harmonics.end(), h) == harmonics.end()) harmonics.push_back(h);
  }
  std::vector<SectorSumRecord> sectors;
  if (want(kSectorSection)) {
    for (const auto& [n, k] : harmonics) sectors.push_back(sector_sum(ball, n, k));
    auto out = open_out(dir / "sectors.csv");
    write_sector_csv(sectors, out);
  }
  if (want(kSectorSection) && delta > 0.5 && !measure.empty) {
    const auto rows = compare_ratios(sectors, measure, delta);
    auto out = open_out(dir / "ratios.csv");
    out << "n,k,empirical_re,empirical_im,predicted_re,predicted_im,abs_error,"
           "constant_predicted_re,constant_empirical_re\n";
    double worst = 0;
    for (const auto& r : rows) {
      out << r.n << "," << r.k << "," << r.empirical.real() << "," << r.empirical.imag() << ","
          << r.predicted.real() << "," << r.predicted.imag() << "," << r.abs_error << ","
          << r.constant_predicted.real() << "," << r.constant_empirical.real() << "\n";
      worst = std::max(worst, r.abs_error);
    }
    summary["ratio_max_error"] = worst;
    if (config.assertions.ratio_error) {
      result.assertions.push_back({"ratio_error", worst < *config.assertions.ratio_error,
                                   "max abs error " + std::to_string(worst)});
    }
  } else if (want(kSectorSection)) {
    summary["ratio_comparison"] = "skipped: critical exponent estimate <= 1/2 or empty measure";
    if (config.assertions.ratio_error) {
      result.assertions.push_back({"ratio_error", false, "skipped: delta_hat <= 1/2"});
    }
  }

  // Affine and vector windows.
  if (want(kAffineSection)) {
    auto out = open_out(dir / "affine.csv");
    out << "mode,v1,v2,w1,w2,n,c,d,y1,y2,q,N,K,T,count,statistic,warnings\n";
    for (const AffineBlock& b : config.affine) {
      const OrbitBall sub = restrict_ball(ball, b.T);
      for (Int q : b.q) {
        for (double K : b.K) {
          AffineQuery query;
          query.mode = b.mode;
          query.v = b.v;
          query.w = b.w;
          query.n_target = b.n_target;
          query.cd = b.cd;
          query.y = b.y;
          query.q = q;
          query.N = b.N;
          query.K = K;
          query.T = b.T;
          const WindowCount wc = b.mode == QueryMode::lower_bound ? affine_window_count(sub, query)
                                                                  : vector_window_count(sub, query);
          const double stat = b.mode == QueryMode::vector_window
                                  ? normalized_upper_statistic(wc.count, K, q, b.T, delta)
                                  : static_cast<double>(wc.count) * K;
          out << (b.mode == QueryMode::lower_bound ? "lower_bound" : "vector_window") << "," << b.v.first
              << "," << b.v.second << "," << b.w.first << "," << b.w.second << "," << b.n_target << ","
              << b.cd.first << "," << b.cd.second << "," << b.y.first << "," << b.y.second << "," << q
              << "," << b.N << "," << K << "," << b.T << "," << wc.count << "," << stat << ",\""
              << join(wc.warnings) << "\"\n";
        }
      }
    }
  }

  // Congruence cosets.
  if (want(kCongruenceSection)) {
    auto out = open_out(dir / "congruence.csv");
    out << "q,q_prime,q_double_prime,index,coset,count,expected,deviation_sqrtN\n";
    const bool any = std::any_of(config.moduli.begin(), config.moduli.end(), [](Int q) { return q > 1; });
    if (!any) {
      summary["congruence"] = "skipped: no modulus above 1";
    } else {
      const double T = config.coset_T > 0 ? config.coset_T : T_max;
      const OrbitBall sub = restrict_ball(ball, T);
      const double N = static_cast<double>(sub.size());
      double worst = 0;
      std::mt19937_64 rng(config.seed);
      json reps = json::array();
      for (Int q : config.moduli) {
        if (q == 1) continue;
        const CongruenceContext ctx(config.group, q, config.ramification);
        const auto counts = coset_counts(sub, ctx);
        const double expected = N / static_cast<double>(ctx.index());
        for (std::size_t i = 0; i < counts.size(); ++i) {
          const double dev = std::fabs(static_cast<double>(counts[i]) - expected) / std::sqrt(N);
          worst = std::max(worst, dev);
          out << q << "," << ctx.q_prime() << "," << ctx.q_double_prime() << "," << ctx.index() << "," << i
              << "," << counts[i] << "," << expected << "," << dev << "\n";
        }
        // Sector sum over a sampled coset gamma0 Gamma(q) for the first harmonic.
        std::uniform_int_distribution<std::size_t> pick(0, sub.size() - 1);
        const GroupElement& gamma0 = sub.elements[pick(rng)].element;
        const OrbitBall coset = coset_filter(sub, ctx, gamma0);
        const auto& [n1, k1] = harmonics.size() > 1 ? harmonics[1] : harmonics[0];
        const auto local = sector_sum(coset, n1, k1);
        const auto full = sector_sum(sub, n1, k1);
        reps.push_back({{"q", q},
                        {"gamma0", to_string(gamma0)},
                        {"n", n1},
                        {"k", k1},
                        {"coset_sum_re", local.value.real()},
                        {"full_sum_over_index_re", full.value.real() / static_cast<double>(ctx.index())},
                        {"coset_count", local.raw_count}});
      }
      summary["coset_T"] = T;
      summary["coset_max_deviation_sqrtN"] = worst;
      summary["coset_samples"] = reps;
      if (config.assertions.coset_sigma) {
        result.assertions.push_back({"coset_uniformity", worst <= *config.assertions.coset_sigma,
                                     "max deviation " + std::to_string(worst) + " sqrt(N)"});
      }
    }
  }

  // Identity suite.
  if (config.run_specfun && want(kSpecfunSection)) {
    const auto report = specfun::run_identity_suite();
    write_json(dir / "specfun.json", report.to_json(false));
    summary["specfun_all_pass"] = report.all_pass();
    if (config.assertions.specfun) {
      std::vector<std::string> failed;
      for (const auto& c : report.checks) {
        if (!c.pass) failed.push_back(c.name);
      }
      result.assertions.push_back({"specfun", failed.empty(), failed.empty() ? "all pass" : "failed: " + join(failed)});
    }
  }

  json asserts = json::array();
  for (const auto& a : result.assertions) {
    asserts.push_back({{"name", a.name}, {"pass", a.pass}, {"detail", a.detail}});
  }
  summary["assertions"] = asserts;
  summary["all_pass"] = result.all_pass();
  write_json(dir / "summary.json", summary);
  result.summary = summary;
  return result;
}

}  // namespace hyperorbit
