#pragma once

#include <json.hpp>
#include <set>
#include <string>
#include <vector>

#include "tsp/core.hpp"
#include "tsp/domains/domain.hpp"
#include "tsp/est/estimators.hpp"

namespace tsp {

using Json = nlohmann::ordered_json;

struct Scenario {
  std::string name;
  ProcessParams params;
  Json domain_spec;
  DomainShape domain;
  EstimatorConfig est;  // sim config, threads, block
  long n = 0;
  Json experiment = Json::object();
  Json source;  // the document as read, echoed into reports
};

// Throws ConfigError naming the offending key.
Scenario parse_scenario(const Json& doc);
Scenario load_scenario(const std::string& path);
DomainShape parse_domain(const Json& spec, int d);
Point parse_point(const Json& v, const std::string& key, int d = -1);

// Strict accessor for an experiment's knob object: every key read is recorded,
// and finish() rejects keys that were never asked for.
class Knobs {
 public:
  Knobs(const Json& obj, std::string where);
  double num(const std::string& key, double def);
  long integer(const std::string& key, long def);
  bool flag(const std::string& key, bool def);
  std::vector<double> nums(const std::string& key, const std::vector<double>& def);
  Point point(const std::string& key, const Point& def);
  bool has(const std::string& key) const { return obj_.contains(key); }
  const Json& raw(const std::string& key);
  void finish() const;

 private:
  const Json& obj_;
  std::string where_;
  std::set<std::string> used_;
};

}  // namespace tsp
