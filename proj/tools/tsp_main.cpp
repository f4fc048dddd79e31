#include <CLI11.hpp>
#include <cstdio>
#include <iostream>
#include <sstream>

#include "tsp/kernels/ball.hpp"
#include "tsp/kernels/constants.hpp"
#include "tsp/kernels/psi.hpp"
#include "tsp/kernels/r0.hpp"
#include "tsp/sim/simulator.hpp"
#include "tsp/verify/experiments.hpp"

using namespace tsp;

namespace {

struct Globals {
  uint64_t seed = 0;
  bool seed_set = false;
  int threads = 0;
  std::string out, format = "json";
};

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Point parse_coords(const std::string& s, int d) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) v.push_back(std::stod(item));
  if (static_cast<int>(v.size()) != d)
    throw Error(ErrorCode::ConfigError, "point '" + s + "' needs " + std::to_string(d) + " coordinates");
  return Point::from(v);
}

Scenario load_with_overrides(const std::string& path, const Globals& g) {
  Scenario s = load_scenario(path);
  if (g.seed_set) s.est.sim.seed = g.seed;
  if (g.threads > 0) s.est.threads = g.threads;
  return s;
}

void emit(const std::string& text, const Globals& g) {
  if (g.out.empty())
    std::cout << text;
  else
    write_file_atomic(g.out, text);
}

int finish_report(const Report& r, const Globals& g) {
  if (g.out.empty())
    std::cout << (g.format == "csv" ? r.to_csv() : r.to_json().dump(2) + "\n");
  else
    write_report(r, g.out, g.format);
  std::cerr << r.name << ": " << r.checks.size() - r.failures() << "/" << r.checks.size() << " checks pass ("
            << r.wall_time << " s)\n";
  return r.all_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"truncated stable process toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  auto* seed_opt = app.add_option("--seed", g.seed, "override the scenario seed");
  app.add_option("--threads", g.threads, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--out", g.out, "output file (stdout when absent)");
  app.add_option("--format", g.format, "report format")->check(CLI::IsMember({"json", "csv"}));

  // kernels
  auto* kern = app.add_subcommand("kernels", "evaluate closed forms as CSV rows");
  kern->require_subcommand(1);
  int d = 2;
  double alpha = 1.0, xi = 0.0, radius = 1.0;
  std::string xs, ys;
  auto add_params = [&](CLI::App* c) {
    c->add_option("--d", d)->check(CLI::Range(1, 3));
    c->add_option("--alpha", alpha);
  };
  auto* k_psi = kern->add_subcommand("psi", "characteristic exponent");
  add_params(k_psi);
  k_psi->add_option("--xi", xi)->check(CLI::NonNegativeNumber);
  auto* k_poi = kern->add_subcommand("poisson", "ball Poisson kernel K_B(x, z)");
  add_params(k_poi);
  k_poi->add_option("--radius", radius);
  k_poi->add_option("--x", xs)->required();
  k_poi->add_option("--z", ys)->required();
  auto* k_green = kern->add_subcommand("green", "ball Green function G_B(x, y)");
  add_params(k_green);
  k_green->add_option("--radius", radius);
  k_green->add_option("--x", xs)->required();
  k_green->add_option("--y", ys)->required();
  auto* k_r0 = kern->add_subcommand("r0", "Khasminskii radius");
  add_params(k_r0);
  auto* k_const = kern->add_subcommand("constants", "A, B and ball constants");
  add_params(k_const);

  // simulate / estimate
  std::string scenario_path, start;
  long paths = 10;
  auto* sim = app.add_subcommand("simulate", "exit records of single paths as CSV");
  sim->add_option("--scenario", scenario_path)->required();
  sim->add_option("--x", start)->required();
  sim->add_option("--paths", paths)->check(CLI::PositiveNumber);
  std::string quantity = "exit_time";
  double r_in = 0.0, r_out = 0.0;
  auto* est = app.add_subcommand("estimate", "Monte Carlo estimate in the scenario domain");
  est->add_option("quantity", quantity)->check(CLI::IsMember({"exit_time", "harmonic_annulus"}));
  est->add_option("--scenario", scenario_path)->required();
  est->add_option("--x", start)->required();
  est->add_option("--r-inner", r_in);
  est->add_option("--r-outer", r_out);
  long est_paths = 0;
  est->add_option("--paths", est_paths, "override the scenario path count")->check(CLI::PositiveNumber);

  // verify / run
  std::string experiment;
  auto* ver = app.add_subcommand("verify", "run one experiment on a scenario");
  ver->add_option("experiment", experiment)->required();
  ver->add_option("--scenario", scenario_path)->required();
  auto* run = app.add_subcommand("run", "run the experiment named in a scenario file");
  run->add_option("path", scenario_path)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  g.seed_set = seed_opt->count() > 0;

  try {
    if (kern->parsed()) {
      const ProcessParams p = ProcessParams::make(d, alpha);
      std::ostringstream o;
      if (k_psi->parsed()) {
        const KernelValue v = char_exponent_psi(p, xi);
        o << "d,alpha,xi,psi,est_error\n" << d << "," << num(alpha) << "," << num(xi) << "," << num(v.value) << ","
          << num(v.est_error) << "\n";
      } else if (k_poi->parsed()) {
        const Point x = parse_coords(xs, d), z = parse_coords(ys, d);
        o << "d,alpha,radius,x,z,poisson\n" << d << "," << num(alpha) << "," << num(radius) << ",\"" << xs << "\",\""
          << ys << "\"," << num(stable_poisson_ball(p, Point::zeros(d), radius, x, z)) << "\n";
      } else if (k_green->parsed()) {
        const Point x = parse_coords(xs, d), y = parse_coords(ys, d);
        const KernelValue v = stable_green_ball(p, Point::zeros(d), radius, x, y);
        o << "d,alpha,radius,x,y,green,est_error\n" << d << "," << num(alpha) << "," << num(radius) << ",\"" << xs
          << "\",\"" << ys << "\"," << num(v.value) << "," << num(v.est_error) << "\n";
      } else if (k_r0->parsed()) {
        const R0Result r = compute_r0_detailed(p);
        o << "d,alpha,r0,khasminskii_radius,sup_conditioned\n" << d << "," << num(alpha) << "," << num(r.r0) << ","
          << num(r.khasminskii_radius) << "," << num(r.sup_conditioned) << "\n";
      } else if (k_const->parsed()) {
        o << "d,alpha,A,B,surface,poisson_constant,green_constant,exit_time_constant\n" << d << "," << num(alpha)
          << "," << num(constant_A(p)) << "," << num(constant_B(p)) << "," << num(sphere_surface_area(d)) << ","
          << num(poisson_ball_constant(p)) << "," << num(green_ball_constant(p)) << ","
          << num(exit_time_constant(p)) << "\n";
      }
      emit(o.str(), g);
      return 0;
    }
    if (sim->parsed()) {
      const Scenario s = load_with_overrides(scenario_path, g);
      const Point x = parse_coords(start, s.params.d);
      std::ostringstream o;
      o << "path,exit_time,by_jump,censored";
      for (int i = 0; i < s.params.d; ++i) o << ",y" << i;
      o << "\n";
      for (long i = 0; i < paths; ++i) {
        RngStream rng(s.est.sim.seed, static_cast<uint64_t>(i));
        const ExitRecord r = simulate_exit(s.params, s.domain, x, s.est.sim, rng);
        o << i << "," << num(r.exit_time) << "," << r.by_jump << "," << r.censored;
        for (int j = 0; j < s.params.d; ++j) o << "," << num(r.exit_position[j]);
        o << "\n";
      }
      emit(o.str(), g);
      return 0;
    }
    if (est->parsed()) {
      Scenario s = load_with_overrides(scenario_path, g);
      if (est_paths > 0) s.n = est_paths;
      const Point x = parse_coords(start, s.params.d);
      MCEstimate e;
      if (quantity == "exit_time") {
        e = mean_exit_time(s.params, s.domain, x, s.n, s.est);
      } else {
        const double hi = r_out > 0.0 ? r_out : INFINITY;
        e = harmonic_measure(s.params, s.domain, x, TargetSet::annulus(Point::zeros(s.params.d), r_in, hi), s.n,
                             s.est);
      }
      std::ostringstream o;
      o << "quantity,mean,stderr,n,censored_fraction,seed\n"
        << quantity << "," << num(e.mean) << "," << num(e.std_error) << "," << e.n << ","
        << num(e.censored_fraction) << "," << e.seed << "\n";
      emit(o.str(), g);
      return 0;
    }
    Scenario s = load_with_overrides(scenario_path, g);
    if (ver->parsed()) {
      find_experiment(experiment);
      if (s.name != experiment)
        throw Error(ErrorCode::ConfigError, "scenario names '" + s.name + "', not '" + experiment + "'");
    }
    return finish_report(run_experiment(s), g);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::ConfigError ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
