#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hyperorbit/error.hpp"
#include "hyperorbit/report.hpp"

using namespace hyperorbit;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::vector<std::pair<double, double>> synthetic(double (*law)(double)) {
  std::vector<std::pair<double, double>> out;
  for (int i = 0; i <= 10; ++i) {
    const double T = 1e3 * std::pow(100.0, i / 10.0);
    out.emplace_back(T, law(T));
  }
  return out;
}

json small_config(const fs::path& out) {
  return {{"group", {{"c", 4}}},
          {"T_grid", {20, 40, 80, 160, 320, 640, 1280, 2560}},
          {"harmonics", {{1, 0}, {2, 0}, {-2, 0}, {1, 1}}},
          {"affine",
           {{{"mode", "lower_bound"}, {"v", {1, 0}}, {"w", {0, 3}}, {"n", 300}, {"N", 1000}, {"K", {10, 20}}, {"T", 256}},
            {{"mode", "vector_window"}, {"cd", {0, 1}}, {"y", {120, 29}}, {"q", {1, 3}}, {"N", 3000}, {"K", {10, 20}}, {"T", 2560}}}},
          {"congruence", {{"moduli", {3}}, {"T", 1000}}},
          {"output_dir", out.string()},
          {"seed", 3}};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("hyperorbit_report_" + name);
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("power-law fits") {
  const auto exact = synthetic([](double T) { return 7 * std::pow(T, 1.4); });
  const FitResult f = fit_power_law(exact);
  CHECK(f.exponent == doctest::Approx(1.4).epsilon(1e-12));
  CHECK(f.constant == doctest::Approx(7).epsilon(1e-9));
  CHECK(f.r_squared == doctest::Approx(1));
  CHECK(f.window.first == doctest::Approx(1e3));
  CHECK(f.window.second == doctest::Approx(1e5));
  CHECK(f.residuals.size() == exact.size());

  const auto perturbed = synthetic([](double T) { return std::pow(T, 1.4) * (1 + std::pow(T, -0.5)); });
  const FitResult g = fit_power_law(perturbed);
  CHECK(std::fabs(g.exponent - 1.4) < 0.02);
  CHECK(g.r_squared >= 0);
  CHECK(g.r_squared <= 1);

  const auto zero = synthetic([](double) { return 0.0; });
  CHECK_THROWS_AS(fit_power_law(zero), DomainError);
  const std::vector<std::pair<double, double>> few = {{1, 1}, {2, 2}};
  CHECK_THROWS_AS(fit_power_law(few), DomainError);
}

TEST_CASE("config validation") {
  const json good = small_config("out");
  const ExperimentConfig cfg = parse_config(good);
  CHECK(cfg.group.label == "Gamma_4");
  CHECK(cfg.ramification == 4);
  CHECK(cfg.T_max() == 2560);
  CHECK(cfg.affine.size() == 2);
  CHECK(cfg.moduli == std::vector<Int>{3});

  json missing = good;
  missing.erase("T_grid");
  CHECK_THROWS_AS(parse_config(missing), ConfigError);

  json bad_q = good;
  bad_q["congruence"]["moduli"] = {0};
  CHECK_THROWS_AS(parse_config(bad_q), ConfigError);

  json bad_group = good;
  bad_group["group"] = {{"label", "x"}, {"generators", {{1, 2, 3, 4}}}};
  CHECK_THROWS_AS(parse_config(bad_group), ConfigError);

  json custom = good;
  custom["group"] = {{"label", "G"}, {"generators", {{1, 5, 0, 1}, {1, 0, 5, 1}}}, {"ramification", 5}};
  CHECK(parse_config(custom).ramification == 5);

  json wrong_type = good;
  wrong_type["T_grid"] = "many";
  CHECK_THROWS_AS(parse_config(wrong_type), ConfigError);

  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("ratio comparison") {
  const OrbitBall ball = enumerate_ball(gamma_c(4), 3000);
  std::vector<SectorSumRecord> sectors;
  for (auto [n, k] : {std::pair{0, 0}, std::pair{2, 1}, std::pair{-2, -1}}) sectors.push_back(sector_sum(ball, n, k));
  MeasureOptions opts;
  opts.delta_hat = 0.68;
  const BoundaryMeasure mu = build_measure(ball, 0.8, opts);
  const auto rows = compare_ratios(sectors, mu, 0.68);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].empirical == std::complex<double>(1, 0));
  CHECK(std::abs(rows[0].predicted - 1.0) < 1e-15);
  CHECK(rows[0].abs_error < 1e-15);
  CHECK(std::abs(rows[1].empirical - std::conj(rows[2].empirical)) < 1e-12);
  CHECK(std::abs(rows[1].predicted - std::conj(rows[2].predicted)) < 1e-12);
  const std::vector<SectorSumRecord> no_base = {sectors[1]};
  CHECK_THROWS_AS(compare_ratios(no_base, mu, 0.68), DomainError);
}

TEST_CASE("experiment bundle is deterministic") {
  const fs::path a = scratch("a");
  const fs::path b = scratch("b");
  const ExperimentConfig cfg = parse_config(small_config(a));
  const ExperimentResult ra = run_experiment(cfg);
  RunOptions other;
  other.output_dir = b;
  other.threads = 3;
  run_experiment(cfg, other);
  CHECK(ra.all_pass());
  for (const char* name : {"growth.csv", "exponents.json", "measure.csv", "mu.csv", "sectors.csv", "ratios.csv",
                           "affine.csv", "congruence.csv", "summary.json"}) {
    CAPTURE(name);
    REQUIRE(fs::exists(a / name));
    CHECK(slurp(a / name) == slurp(b / name));
  }
  CHECK_FALSE(fs::exists(a / "specfun.json"));
  const json summary = json::parse(slurp(a / "summary.json"));
  CHECK(summary["schema_version"] == 1);
  CHECK(summary["delta_countfit"].get<double>() > 0.5);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("modulus one skips the congruence section") {
  const fs::path dir = scratch("q1");
  json doc = small_config(dir);
  doc["congruence"]["moduli"] = {1};
  const ExperimentResult r = run_experiment(parse_config(doc));
  CHECK(r.summary["congruence"].get<std::string>().rfind("skipped", 0) == 0);
  fs::remove_all(dir);
}

TEST_CASE("a small exponent skips the ratio comparison") {
  const fs::path dir = scratch("cyclic");
  json doc = small_config(dir);
  doc["group"] = {{"label", "hyperbolic cyclic"}, {"generators", {{2, 1, 1, 1}}}};
  doc["affine"] = json::array();
  doc["congruence"] = {{"moduli", {1}}};
  doc["assertions"] = {{"ratio_error", 0.1}};
  const ExperimentResult r = run_experiment(parse_config(doc));
  CHECK(r.summary["delta_countfit"].get<double>() < 0.5);
  CHECK(r.summary.contains("ratio_comparison"));
  CHECK_FALSE(fs::exists(dir / "ratios.csv"));
  CHECK_FALSE(r.all_pass());
  fs::remove_all(dir);
}

TEST_CASE("assertions are evaluated") {
  const fs::path dir = scratch("asserts");
  json doc = small_config(dir);
  doc["assertions"] = {{"delta_agreement", 1e-9}, {"coset_sigma", 1e9}};
  const ExperimentResult r = run_experiment(parse_config(doc));
  REQUIRE(r.assertions.size() == 2);
  CHECK_FALSE(r.assertions[0].pass);
  CHECK(r.assertions[1].pass);
  CHECK_FALSE(r.all_pass());
  fs::remove_all(dir);
}
