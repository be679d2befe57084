// hyperorbit: orbit enumeration, boundary measures, sector and window
// counts, and the special-function identity suite.
//
// Exit codes: 0 pass, 1 assertion failure, 2 configuration error,
// 3 numeric abort.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "hyperorbit/error.hpp"
#include "hyperorbit/group_orbit.hpp"
#include "hyperorbit/hyperbolic_core.hpp"
#include "hyperorbit/report.hpp"
#include "hyperorbit/specfun_verify.hpp"

namespace fs = std::filesystem;
using namespace hyperorbit;

namespace {

enum Exit { kPass = 0, kAssertion = 1, kConfig = 2, kNumeric = 3 };

struct Common {
  std::string config;
  std::string cache_dir;
  std::string out;
  int threads = 0;
};

void add_common(CLI::App* sub, Common& c, bool config_required) {
  auto* opt = sub->add_option("--config", c.config, "experiment config (JSON)")->check(CLI::ExistingFile);
  if (config_required) opt->required();
  sub->add_option("--cache-dir", c.cache_dir, "orbit cache directory");
  sub->add_option("--threads", c.threads, "worker threads")->check(CLI::PositiveNumber);
  sub->add_option("--out", c.out, "output directory");
}

RunOptions run_options(const Common& c) {
  RunOptions o;
  if (!c.cache_dir.empty()) o.cache_dir = c.cache_dir;
  if (c.threads > 0) o.threads = c.threads;
  if (!c.out.empty()) o.output_dir = c.out;
  return o;
}

int report_assertions(const ExperimentResult& r) {
  for (const auto& a : r.assertions) {
    std::cout << (a.pass ? "PASS " : "FAIL ") << a.name << ": " << a.detail << "\n";
  }
  return r.all_pass() ? kPass : kAssertion;
}

int run_sections(const Common& c, unsigned sections) {
  const ExperimentConfig cfg = load_config(c.config);
  RunOptions o = run_options(c);
  o.sections = sections;
  const ExperimentResult r = run_experiment(cfg, o);
  std::cout << r.summary.dump(2) << "\n";
  return report_assertions(r);
}

int cmd_enumerate(const Common& c, int group_c, double T) {
  GroupPresentation group;
  RunOptions o = run_options(c);
  if (!c.config.empty()) {
    const ExperimentConfig cfg = load_config(c.config);
    group = cfg.group;
    if (T <= 0) T = cfg.T_max();
    if (!o.threads) o.threads = cfg.threads;
  } else {
    if (group_c < 3) throw ConfigError("--c must be >= 3 when no config is given");
    group = gamma_c(group_c);
  }
  if (T <= 1) throw ConfigError("--T must exceed 1");
  bool hit = false;
  const OrbitBall ball = acquire_ball(group, T, o, &hit);
  const fs::path dir = o.output_dir.value_or("out");
  fs::create_directories(dir);
  std::ofstream out(dir / "ball.csv");
  if (!out) throw ConfigError("cannot write " + (dir / "ball.csv").string());
  out << std::setprecision(17) << "a,b,c,d,theta1,t,theta2\n";
  for (const OrbitPoint& p : ball.elements) {
    const GroupElement& g = p.element;
    out << g.a() << "," << g.b() << "," << g.c() << "," << g.d() << "," << p.coords.theta1
        << "," << p.coords.t << "," << p.coords.theta2 << "\n";
  }
  std::cout << group.label << " T=" << T << " elements=" << ball.size() << (hit ? " (cache hit)" : "") << "\n";
  return kPass;
}

int cmd_decompose(const std::vector<Int>& m) {
  GroupElement g;
  try {
    g = GroupElement(m[0], m[1], m[2], m[3]);
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  const CartanCoords k = cartan_decompose(g);
  std::cout << std::setprecision(17) << "{\"theta1\": " << k.theta1 << ", \"t\": " << k.t
            << ", \"theta2\": " << k.theta2 << ", \"r\": " << k.r
            << ", \"degenerate\": " << (k.degenerate ? "true" : "false") << "}\n";
  return kPass;
}

int cmd_verify_specfun(const Common& c) {
  const auto report = specfun::run_identity_suite();
  for (const auto& chk : report.checks) {
    std::printf("%s %-24s max_error=%.3e tol=%.1e\n", chk.pass ? "PASS" : "FAIL", chk.name.c_str(),
                chk.max_error, chk.tolerance);
  }
  std::printf("total %.1f s\n", report.seconds);
  if (!c.out.empty()) {
    fs::create_directories(c.out);
    std::ofstream out(fs::path(c.out) / "specfun.json");
    out << std::setprecision(17) << report.to_json(false).dump(2) << "\n";
  }
  return report.all_pass() ? kPass : kAssertion;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Orbit counting experiments for thin subgroups of SL(2,Z)"};
  app.require_subcommand(1);

  Common enum_c, ps_c, sec_c, aff_c, spec_c, rep_c;
  int group_c = 4;
  double T = 0;
  auto* enumerate = app.add_subcommand("enumerate", "enumerate an orbit ball and write ball.csv");
  add_common(enumerate, enum_c, false);
  enumerate->add_option("--c", group_c, "use Gamma_c when no config is given");
  enumerate->add_option("--T", T, "norm bound (default: largest T in the config grid)");

  std::vector<Int> matrix;
  auto* decompose = app.add_subcommand("decompose", "Cartan coordinates of an integer matrix");
  decompose->add_option("matrix", matrix, "entries a b c d")->required()->expected(4);

  auto* ps = app.add_subcommand("ps", "critical exponent and boundary measure");
  add_common(ps, ps_c, true);
  auto* sectors = app.add_subcommand("sectors", "sector sums and ratio comparison");
  add_common(sectors, sec_c, true);
  auto* affine = app.add_subcommand("affine", "affine and vector window counts");
  add_common(affine, aff_c, true);
  auto* verify = app.add_subcommand("verify-specfun", "run the special-function identity suite");
  verify->add_option("--out", spec_c.out, "write specfun.json here");
  auto* report = app.add_subcommand("report", "full experiment bundle");
  add_common(report, rep_c, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kConfig;
  }

  try {
    if (*enumerate) return cmd_enumerate(enum_c, group_c, T);
    if (*decompose) return cmd_decompose(matrix);
    if (*ps) return run_sections(ps_c, kMeasureSection);
    if (*sectors) return run_sections(sec_c, kMeasureSection | kSectorSection);
    if (*affine) return run_sections(aff_c, kAffineSection);
    if (*verify) return cmd_verify_specfun(spec_c);
    if (*report) return run_sections(rep_c, kAllSections);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const Error& e) {
    std::cerr << "numeric abort: " << e.what() << "\n";
    return kNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumeric;
  }
  return kConfig;
}
