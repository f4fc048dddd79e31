#include "tsp/verify/report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace tsp {

namespace {
// JSON has no infinities; keep them readable and round-trippable
Json num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}
}  // namespace

const CheckRecord& Report::check(const std::string& id, const std::string& detail, double lhs,
                                 const std::string& relation, double rhs, double tolerance) {
  CheckRecord c{id, detail, relation, lhs, rhs, tolerance, false};
  if (relation == "<=")
    c.pass = lhs <= rhs + tolerance;
  else if (relation == ">=")
    c.pass = lhs >= rhs - tolerance;
  else if (relation == "==")
    c.pass = std::abs(lhs - rhs) <= tolerance;
  else
    throw Error(ErrorCode::ParamOutOfRange, "unknown relation " + relation);
  checks.push_back(c);
  return checks.back();
}

const CheckRecord& Report::check_true(const std::string& id, const std::string& detail, bool ok) {
  return check(id, detail, ok ? 1.0 : 0.0, "==", 1.0, 0.0);
}

void Report::estimate(const std::string& n, const MCEstimate& e) { estimates.push_back({n, e.mean, e.std_error, e.n}); }

void Report::estimate(const std::string& n, double mean, double std_error, long count) {
  estimates.push_back({n, mean, std_error, count});
}

bool Report::all_pass() const { return failures() == 0; }

long Report::failures() const {
  long f = 0;
  for (const auto& c : checks) f += !c.pass;
  return f;
}

Json Report::body() const {
  Json j;
  j["scenario"] = scenario;
  j["seed"] = seed;
  j["version"] = kToolkitVersion;
  Json checks_j = Json::array();
  for (const auto& c : checks) {
    Json r;
    r["check_id"] = c.check_id;
    r["detail"] = c.detail;
    r["lhs"] = num(c.lhs);
    r["relation"] = c.relation;
    r["rhs"] = num(c.rhs);
    r["tolerance"] = num(c.tolerance);
    r["pass"] = c.pass;
    checks_j.push_back(r);
  }
  j["checks"] = checks_j;
  Json est = Json::array();
  for (const auto& e : estimates) {
    Json r;
    r["name"] = e.name;
    r["mean"] = num(e.mean);
    r["stderr"] = num(e.std_error);
    r["n"] = e.n;
    est.push_back(r);
  }
  j["estimates"] = est;
  j["pass"] = all_pass();
  return j;
}

Json Report::to_json() const {
  Json j = body();
  j["wall_time"] = wall_time;
  return j;
}

std::string Report::to_csv() const {
  std::ostringstream o;
  o << "check_id,lhs,rhs,tolerance,pass\n";
  for (const auto& c : checks)
    o << c.check_id << ',' << fmt(c.lhs) << ',' << fmt(c.rhs) << ',' << fmt(c.tolerance) << ','
      << (c.pass ? "true" : "false") << '\n';
  return o.str();
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::ConfigError, "cannot write " + tmp.string());
    out << content;
    if (!out.flush()) throw Error(ErrorCode::ConfigError, "write failed for " + tmp.string());
  }
  fs::rename(tmp, target);
}

void write_report(const Report& r, const std::string& path, const std::string& format) {
  if (format == "json")
    write_file_atomic(path, r.to_json().dump(2) + "\n");
  else if (format == "csv")
    write_file_atomic(path, r.to_csv());
  else
    throw Error(ErrorCode::ConfigError, "unknown format '" + format + "' (expected csv or json)");
}

}  // namespace tsp
