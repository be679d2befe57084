#pragma once

// Power-law fits, experiment configuration, and the end-to-end experiment
// runner that writes the CSV/JSON bundle.

#include <complex>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "hyperorbit/group_orbit.hpp"
#include "hyperorbit/ps_measure.hpp"
#include "hyperorbit/sector_count.hpp"

namespace hyperorbit {

struct FitResult {
  double exponent = 0;
  double constant = 0;
  std::vector<double> residuals;  // in log space
  std::pair<double, double> window{0, 0};
  double r_squared = 0;
};

// Least squares of log value against log T; needs >= 5 points, all positive.
FitResult fit_power_law(std::span<const std::pair<double, double>> records);

struct AffineBlock {
  QueryMode mode = QueryMode::lower_bound;
  IntVec v{1, 0};
  IntVec w{0, 1};
  Int n_target = 0;
  IntVec cd{0, 1};
  IntVec y{0, 0};
  std::vector<Int> q{1};
  std::vector<double> K{10};
  double N = 0;
  double T = 0;
};

struct AssertionSettings {
  std::optional<double> delta_agreement;  // |countfit - poincare| bound
  std::optional<double> ratio_error;      // compare_ratios absolute error bound
  std::optional<double> coset_sigma;      // coset deviation in units of sqrt(N)
  bool specfun = false;                   // identity suite must pass
};

struct ExperimentConfig {
  GroupPresentation group;
  Int ramification = 1;
  std::vector<double> T_grid;
  std::vector<std::pair<int, int>> harmonics;
  std::optional<double> s_offset;  // default 1 / log T_max
  int mu_max_n = 4;
  std::vector<AffineBlock> affine;
  std::vector<Int> moduli;
  double coset_T = 0;  // 0: use T_max
  bool run_specfun = false;
  AssertionSettings assertions;
  std::filesystem::path output_dir = "out";
  std::uint64_t seed = 1;
  int threads = 1;

  double T_max() const;
};

// Throws ConfigError with the offending key.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);

struct RatioRow {
  int n = 0;
  int k = 0;
  std::complex<double> empirical;
  std::complex<double> predicted;
  double abs_error = 0;
  // pi^{1/2} Gamma(delta-1/2)/Gamma(delta+1) mu(2n) mu(2k) against value / T^{2 delta};
  // normalization is not fixed, so these are reported only.
  std::complex<double> constant_predicted;
  std::complex<double> constant_empirical;
};

// value(n,k)/value(0,0) against mu(2n) mu(2k) / mu(0)^2.
std::vector<RatioRow> compare_ratios(std::span<const SectorSumRecord> sectors, const BoundaryMeasure& mu,
                                     double delta);

struct AssertionOutcome {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct ExperimentResult {
  std::vector<AssertionOutcome> assertions;
  nlohmann::json summary;
  bool all_pass() const;
};

// Output sections of run_experiment; growth and exponents are always written.
enum Section : unsigned {
  kMeasureSection = 1u << 0,
  kSectorSection = 1u << 1,
  kAffineSection = 1u << 2,
  kCongruenceSection = 1u << 3,
  kSpecfunSection = 1u << 4,
  kAllSections = (1u << 5) - 1,
};

struct RunOptions {
  std::optional<std::filesystem::path> cache_dir;
  std::optional<int> threads;
  std::optional<std::filesystem::path> output_dir;
  unsigned sections = kAllSections;
};

// Ball of radius T, through the cache when a cache directory is given.
// Throws DomainError when the enumeration is incomplete.
OrbitBall acquire_ball(const GroupPresentation& group, double T, const RunOptions& options,
                       bool* cache_hit = nullptr);

// Writes growth.csv, exponents.json, then per section measure.csv, mu.csv, sectors.csv,
// ratios.csv, affine.csv, congruence.csv, specfun.json and summary.json.
// Ratio comparisons are skipped, with a message, when delta_hat <= 1/2.
ExperimentResult run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

}  // namespace hyperorbit
