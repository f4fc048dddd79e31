#pragma once

#include <string>
#include <vector>

#include "tsp/verify/scenario.hpp"

namespace tsp {

inline constexpr const char* kToolkitVersion = "0.1.0";

// One comparison. relation is "<=", ">=" or "==": pass iff lhs relation rhs
// holds after widening rhs by tolerance.
struct CheckRecord {
  std::string check_id;
  std::string detail;
  std::string relation = "<=";
  double lhs = 0.0, rhs = 0.0, tolerance = 0.0;
  bool pass = false;
};

struct NamedEstimate {
  std::string name;
  double mean = 0.0, std_error = 0.0;
  long n = 0;
};

class Report {
 public:
  Report() = default;
  explicit Report(const Scenario& s) : scenario(s.source), name(s.name), seed(s.est.sim.seed) {}

  Json scenario;
  std::string name;
  uint64_t seed = 0;
  double wall_time = 0.0;
  std::vector<CheckRecord> checks;
  std::vector<NamedEstimate> estimates;

  // Adds a record and evaluates it.
  const CheckRecord& check(const std::string& id, const std::string& detail, double lhs, const std::string& relation,
                           double rhs, double tolerance);
  // Verdict-only record for booleans (lhs = 1 when ok).
  const CheckRecord& check_true(const std::string& id, const std::string& detail, bool ok);
  void estimate(const std::string& name, const MCEstimate& e);
  void estimate(const std::string& name, double mean, double std_error, long n);

  bool all_pass() const;
  long failures() const;
  // Body excludes wall_time so identical runs compare equal.
  Json body() const;
  Json to_json() const;
  std::string to_csv() const;
};

// Writes to a temporary sibling and renames over path.
void write_file_atomic(const std::string& path, const std::string& content);
void write_report(const Report& r, const std::string& path, const std::string& format);

}  // namespace tsp
