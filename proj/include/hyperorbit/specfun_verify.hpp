#pragma once

// Grid sweeps over the specfun identities, collected into a JSON report.

#include <string>
#include <vector>

#include <json.hpp>

namespace hyperorbit::specfun {

struct IdentityCheck {
  std::string name;
  std::string grid;
  double max_error = 0;
  double tolerance = 0;
  bool pass = false;
  nlohmann::json details = nlohmann::json::object();
};

struct VerificationReport {
  std::vector<IdentityCheck> checks;
  double seconds = 0;

  bool all_pass() const;
  const IdentityCheck* find(const std::string& name) const;
  nlohmann::json to_json(bool include_timing = true) const;
};

// Relative Casimir residual over |n|,|k| <= 5, s in {0.6, 0.75, 0.9}, r in {0.1..0.9}.
IdentityCheck check_casimir_grid();
// R and L acting on Phi e^{2in theta1} e^{2ik theta2}, same grid.
IdentityCheck check_ladder_grid();
// L R on a weight-2k vector equals -4(s+k)(1-s+k).
IdentityCheck check_lowering_raising();
// Series vs connection evaluation of 2F1 on z in [0.4, 0.6].
IdentityCheck check_connection_overlap();
// e^{t(1-s)} Phi(a_t) at t = 20 against the Gamma-ratio limit, with the
// fitted log-slope of the error over t in [10, 20].
IdentityCheck check_asymptotic_constant(double tolerance = 1e-6, double max_slope = -0.9);
// Intertwining constant against quadrature of the intertwining integral at
// x = 0 and x = 0.7, for |k| <= 4 and s in {0.6, 0.75}.
IdentityCheck check_intertwine_quadrature(double tolerance = 1e-7);
// Line-model norm against the nested pairing integral, plus positivity.
IdentityCheck check_btilde_pairing(double tolerance = 1e-7);
// <R v, w> = -<v, L w> for compactly supported test functions.
IdentityCheck check_adjoint(double tolerance = 1e-6);
// |M(a_t)| <= 1 for t in [0, 10], and M_{2n,2n} = Phi_{2n,2n}.
IdentityCheck check_unitarity();

VerificationReport run_identity_suite();

}  // namespace hyperorbit::specfun
