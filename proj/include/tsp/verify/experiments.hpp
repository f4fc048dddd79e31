#pragma once

#include <functional>
#include <string>
#include <vector>

#include "tsp/verify/report.hpp"
#include "tsp/verify/scenario.hpp"

namespace tsp {

Report verify_kernel_identities(const Scenario& s);
Report verify_wos_oracle(const Scenario& s);
Report verify_g1(const Scenario& s);
Report verify_kernel_bounds(const Scenario& s);
Report verify_harnack(const Scenario& s);
Report verify_exit_bound(const Scenario& s);
Report verify_bhp_convex(const Scenario& s);
Report counterexample_experiment(const Scenario& s);

struct ExperimentInfo {
  std::string name;
  std::vector<std::string> check_ids;
  std::function<Report(const Scenario&)> run;
};

const std::vector<ExperimentInfo>& experiment_registry();
const ExperimentInfo& find_experiment(const std::string& name);  // ConfigError when unknown
// Every statement the toolkit checks, one id each.
const std::vector<std::string>& declared_check_ids();

// Dispatches on s.name, times the run and rejects rows with unregistered ids.
Report run_experiment(const Scenario& s);

}  // namespace tsp
