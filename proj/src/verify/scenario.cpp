#include "tsp/verify/scenario.hpp"

#include <fstream>
#include <sstream>

namespace tsp {

namespace {

[[noreturn]] void config_error(const std::string& msg) { throw Error(ErrorCode::ConfigError, msg); }

void only_keys(const Json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) config_error(where + " must be an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok) config_error("unknown key '" + where + "." + it.key() + "'");
  }
}

const Json& need(const Json& obj, const std::string& where, const char* key) {
  if (!obj.contains(key)) config_error("missing required key '" + where + "." + key + "'");
  return obj.at(key);
}

double need_num(const Json& obj, const std::string& where, const char* key) {
  const Json& v = need(obj, where, key);
  if (!v.is_number()) config_error("'" + where + "." + key + "' must be a number");
  return v.get<double>();
}

}  // namespace

Point parse_point(const Json& v, const std::string& key, int d) {
  if (!v.is_array() || v.empty() || v.size() > static_cast<size_t>(kMaxDim))
    config_error("'" + key + "' must be a non-empty array of numbers");
  std::vector<double> c;
  for (const auto& x : v) {
    if (!x.is_number()) config_error("'" + key + "' must contain numbers");
    c.push_back(x.get<double>());
  }
  if (d > 0 && static_cast<int>(c.size()) != d)
    config_error("'" + key + "' has " + std::to_string(c.size()) + " coordinates, expected " + std::to_string(d));
  return Point::from(c);
}

DomainShape parse_domain(const Json& spec, int d) {
  const std::string w = "domain";
  if (!spec.is_object()) config_error("domain must be an object");
  const Json& t = need(spec, w, "type");
  if (!t.is_string()) config_error("'domain.type' must be a string");
  const std::string type = t.get<std::string>();
  try {
    if (type == "ball") {
      only_keys(spec, w, {"type", "center", "radius"});
      return DomainShape::ball(parse_point(need(spec, w, "center"), "domain.center", d), need_num(spec, w, "radius"));
    }
    if (type == "annulus") {
      only_keys(spec, w, {"type", "center", "r_inner", "r_outer"});
      return DomainShape::annulus(parse_point(need(spec, w, "center"), "domain.center", d),
                                  need_num(spec, w, "r_inner"), need_num(spec, w, "r_outer"));
    }
    if (type == "box") {
      only_keys(spec, w, {"type", "low", "high"});
      return DomainShape::box(parse_point(need(spec, w, "low"), "domain.low", d),
                              parse_point(need(spec, w, "high"), "domain.high", d));
    }
    if (type == "polytope") {
      only_keys(spec, w, {"type", "faces", "interior"});
      const Json& faces = need(spec, w, "faces");
      if (!faces.is_array()) config_error("'domain.faces' must be an array");
      std::vector<std::pair<Point, double>> fs;
      for (const auto& f : faces) {
        only_keys(f, "domain.faces[]", {"normal", "offset"});
        fs.emplace_back(parse_point(need(f, "domain.faces[]", "normal"), "domain.faces[].normal", d),
                        need_num(f, "domain.faces[]", "offset"));
      }
      return DomainShape::polytope(fs, parse_point(need(spec, w, "interior"), "domain.interior", d));
    }
    if (type == "counterexample") {
      only_keys(spec, w, {"type"});
      return counterexample_domain(d);
    }
    if (type == "intersect") {
      only_keys(spec, w, {"type", "shape", "center", "radius"});
      return DomainShape::intersect(parse_domain(need(spec, w, "shape"), d),
                                    parse_point(need(spec, w, "center"), "domain.center", d),
                                    need_num(spec, w, "radius"));
    }
    if (type == "ball_union") {
      only_keys(spec, w, {"type", "balls"});
      std::vector<Ball> balls;
      for (const auto& b : need(spec, w, "balls")) {
        only_keys(b, "domain.balls[]", {"center", "radius"});
        balls.push_back(Ball{parse_point(need(b, "domain.balls[]", "center"), "domain.balls[].center", d),
                             need_num(b, "domain.balls[]", "radius")});
      }
      return DomainShape::ball_union(balls);
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ConfigError) throw;
    config_error(std::string("invalid domain: ") + e.what());
  }
  config_error("unknown domain type '" + type + "'");
}

Scenario parse_scenario(const Json& doc) {
  only_keys(doc, "scenario", {"name", "params", "domain", "sim", "estimate", "experiment"});
  const Json& name = need(doc, "scenario", "name");
  if (!name.is_string()) config_error("'name' must be a string");

  const Json& params = need(doc, "scenario", "params");
  only_keys(params, "params", {"d", "alpha"});
  const Json& d = need(params, "params", "d");
  if (!d.is_number_integer()) config_error("'params.d' must be an integer");
  ProcessParams pp;
  try {
    pp = ProcessParams::make(d.get<int>(), need_num(params, "params", "alpha"));
  } catch (const Error& e) {
    config_error(std::string("invalid params: ") + e.what());
  }

  const Json& domain_spec = need(doc, "scenario", "domain");
  Scenario s{name.get<std::string>(), pp, domain_spec, parse_domain(domain_spec, pp.d), {}, 0, Json::object(), doc};

  const Json& sim = need(doc, "scenario", "sim");
  only_keys(sim, "sim",
            {"epsilon", "h", "max_time", "boundary_refine", "seed", "drop_small_jumps", "epsilon_boundary_factor",
             "min_epsilon", "min_step_fraction"});
  SimConfig& c = s.est.sim;
  c.epsilon = need_num(sim, "sim", "epsilon");
  c.time_step = need_num(sim, "sim", "h");
  c.max_time = need_num(sim, "sim", "max_time");
  const Json& br = need(sim, "sim", "boundary_refine");
  if (!br.is_boolean()) config_error("'sim.boundary_refine' must be a boolean");
  c.boundary_refine = br.get<bool>();
  if (sim.contains("seed")) {
    if (!sim["seed"].is_number_unsigned()) config_error("'sim.seed' must be a non-negative integer");
    c.seed = sim["seed"].get<uint64_t>();
  }
  if (sim.contains("drop_small_jumps")) {
    if (!sim["drop_small_jumps"].is_boolean()) config_error("'sim.drop_small_jumps' must be a boolean");
    c.drop_small_jumps = sim["drop_small_jumps"].get<bool>();
  }
  if (sim.contains("epsilon_boundary_factor")) c.epsilon_boundary_factor = need_num(sim, "sim", "epsilon_boundary_factor");
  if (sim.contains("min_epsilon")) c.min_epsilon = need_num(sim, "sim", "min_epsilon");
  if (sim.contains("min_step_fraction")) c.min_step_fraction = need_num(sim, "sim", "min_step_fraction");
  try {
    c.validate();
  } catch (const Error& e) {
    config_error(std::string("invalid sim: ") + e.what());
  }

  const Json& est = need(doc, "scenario", "estimate");
  only_keys(est, "estimate", {"n", "threads", "block"});
  const Json& n = need(est, "estimate", "n");
  if (!n.is_number_integer() || n.get<long>() < 1) config_error("'estimate.n' must be a positive integer");
  s.n = n.get<long>();
  if (est.contains("threads")) {
    if (!est["threads"].is_number_integer() || est["threads"].get<int>() < 1)
      config_error("'estimate.threads' must be a positive integer");
    s.est.threads = est["threads"].get<int>();
  }
  if (est.contains("block")) {
    if (!est["block"].is_number_integer() || est["block"].get<long>() < 1)
      config_error("'estimate.block' must be a positive integer");
    s.est.block = est["block"].get<long>();
  }

  s.experiment = need(doc, "scenario", "experiment");
  if (!s.experiment.is_object()) config_error("'experiment' must be an object");
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) config_error("cannot read scenario file " + path);
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::parse_error& e) {
    config_error(path + ": " + e.what());
  }
  return parse_scenario(doc);
}

Knobs::Knobs(const Json& obj, std::string where) : obj_(obj), where_(std::move(where)) {}

const Json& Knobs::raw(const std::string& key) {
  used_.insert(key);
  return obj_.at(key);
}

double Knobs::num(const std::string& key, double def) {
  used_.insert(key);
  if (!obj_.contains(key)) return def;
  if (!obj_[key].is_number()) config_error("'" + where_ + "." + key + "' must be a number");
  return obj_[key].get<double>();
}

long Knobs::integer(const std::string& key, long def) {
  used_.insert(key);
  if (!obj_.contains(key)) return def;
  if (!obj_[key].is_number_integer()) config_error("'" + where_ + "." + key + "' must be an integer");
  return obj_[key].get<long>();
}

bool Knobs::flag(const std::string& key, bool def) {
  used_.insert(key);
  if (!obj_.contains(key)) return def;
  if (!obj_[key].is_boolean()) config_error("'" + where_ + "." + key + "' must be a boolean");
  return obj_[key].get<bool>();
}

std::vector<double> Knobs::nums(const std::string& key, const std::vector<double>& def) {
  used_.insert(key);
  if (!obj_.contains(key)) return def;
  const Json& v = obj_[key];
  if (!v.is_array()) config_error("'" + where_ + "." + key + "' must be an array");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) config_error("'" + where_ + "." + key + "' must contain numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

Point Knobs::point(const std::string& key, const Point& def) {
  used_.insert(key);
  if (!obj_.contains(key)) return def;
  return parse_point(obj_[key], where_ + "." + key, def.dim());
}

void Knobs::finish() const {
  for (auto it = obj_.begin(); it != obj_.end(); ++it)
    if (!used_.count(it.key())) config_error("unknown key '" + where_ + "." + it.key() + "'");
}

}  // namespace tsp
