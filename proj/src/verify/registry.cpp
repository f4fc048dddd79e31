#include <algorithm>
#include <chrono>
#include <set>

#include "tsp/verify/experiments.hpp"

namespace tsp {

const std::vector<ExperimentInfo>& experiment_registry() {
  static const std::vector<ExperimentInfo> reg = {
      {"kernel_identities",
       {"kernels.poisson_mass", "kernels.green_symmetry", "kernels.green_scaling", "kernels.b_constant",
        "kernels.psi_small", "kernels.psi_large", "kernels.r0_condition"},
       verify_kernel_identities},
      {"wos_oracle", {"wos.annulus_mass"}, verify_wos_oracle},
      {"g1", {"g1.lower", "g1.upper", "g1.control_rejects", "g1.gate_epsilon", "g1.gate_h"}, verify_g1},
      {"kernel_bounds",
       {"kernel_bounds.inner_lower", "kernel_bounds.upper_two", "kernel_bounds.shell_bracket",
        "kernel_bounds.beyond_range", "kernel_bounds.start_comparability"},
       verify_kernel_bounds},
      {"harnack",
       {"harnack.upper", "harnack.lower", "harnack.beyond_cap", "harnack.cap_guard", "harnack.diagonal"},
       verify_harnack},
      {"exit_bound", {"exit_bound.positive", "exit_bound.scale_stability", "exit_bound.kappa_scaling"},
       verify_exit_bound},
      {"bhp_convex", {"bhp.oscillation", "bhp.identity_control", "bhp.carleson", "bhp.boundary_limit"},
       verify_bhp_convex},
      {"counterexample",
       {"counterexample.reachability", "counterexample.max_in_dn", "counterexample.monotone",
        "counterexample.collapse"},
       counterexample_experiment},
  };
  return reg;
}

const ExperimentInfo& find_experiment(const std::string& name) {
  for (const auto& e : experiment_registry())
    if (e.name == name) return e;
  throw Error(ErrorCode::ConfigError, "unknown experiment '" + name + "'");
}

const std::vector<std::string>& declared_check_ids() {
  static const std::vector<std::string> ids = [] {
    std::vector<std::string> out;
    for (const auto& e : experiment_registry()) out.insert(out.end(), e.check_ids.begin(), e.check_ids.end());
    std::sort(out.begin(), out.end());
    return out;
  }();
  return ids;
}

Report run_experiment(const Scenario& s) {
  const ExperimentInfo& info = find_experiment(s.name);
  const auto t0 = std::chrono::steady_clock::now();
  Report r = info.run(s);
  r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const std::set<std::string> allowed(info.check_ids.begin(), info.check_ids.end());
  for (const auto& c : r.checks)
    if (!allowed.count(c.check_id))
      throw Error(ErrorCode::ConfigError, "experiment '" + s.name + "' emitted unregistered check '" + c.check_id + "'");
  return r;
}

}  // namespace tsp
