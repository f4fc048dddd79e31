#pragma once

#include <cmath>
#include <string>

#include "tsp/est/estimators.hpp"
#include "tsp/verify/report.hpp"
#include "tsp/verify/scenario.hpp"

namespace tsp::vdetail {

// Independent RNG streams per sub-run.
inline EstimatorConfig sub_cfg(const Scenario& s, uint64_t k) {
  EstimatorConfig c = s.est;
  c.stream_offset = k << 40;
  return c;
}

// Standard error of a/b for independent estimates.
inline double ratio_se(double a, double se_a, double b, double se_b) {
  if (a == 0.0 || b == 0.0) return 0.0;
  const double r = a / b;
  return std::abs(r) * std::sqrt((se_a / a) * (se_a / a) + (se_b / b) * (se_b / b));
}

inline double pooled(double se1, double se2) { return std::sqrt(se1 * se1 + se2 * se2); }

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline std::string pt(const Point& p) {
  std::string s = "(";
  for (int i = 0; i < p.dim(); ++i) s += (i ? "," : "") + fmt(p[i]);
  return s + ")";
}

inline const Ball& require_ball(const Scenario& s) {
  const Ball* b = std::get_if<Ball>(&s.domain.variant());
  if (!b) throw Error(ErrorCode::ConfigError, "experiment '" + s.name + "' needs a ball domain");
  return *b;
}

inline void require_d2(const Scenario& s) {
  if (s.params.d != 2) throw Error(ErrorCode::ConfigError, "experiment '" + s.name + "' is implemented for d = 2");
}

}  // namespace tsp::vdetail
