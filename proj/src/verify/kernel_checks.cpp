#include <boost/math/quadrature/exp_sinh.hpp>
#include <cmath>

#include "common.hpp"
#include "tsp/kernels/ball.hpp"
#include "tsp/kernels/constants.hpp"
#include "tsp/kernels/psi.hpp"
#include "tsp/kernels/r0.hpp"
#include "tsp/verify/experiments.hpp"

namespace tsp {

using namespace vdetail;

Report verify_kernel_identities(const Scenario& s) {
  Knobs k(s.experiment, "experiment");
  const Json* pairs_json = k.has("pairs") ? &k.raw("pairs") : nullptr;
  const bool with_r0 = k.flag("r0", true);
  k.finish();
  std::vector<ProcessParams> pairs;
  if (pairs_json) {
    for (const auto& e : *pairs_json) {
      if (!e.is_array() || e.size() != 2) throw Error(ErrorCode::ConfigError, "'experiment.pairs' holds [d, alpha]");
      pairs.push_back(ProcessParams::make(e[0].get<int>(), e[1].get<double>()));
    }
  } else {
    for (int d : {2, 3})
      for (double a : {0.5, 1.0, 1.5}) pairs.push_back(ProcessParams::make(d, a));
  }

  Report rep(s);
  for (const auto& p : pairs) {
    const std::string tag = "d=" + std::to_string(p.d) + " alpha=" + fmt(p.alpha);
    const Point o = Point::zeros(p.d);
    for (double a : {0.0, 0.5, 0.9}) {
      const Point x = Point::unit(p.d, 0, a);
      const double m = poisson_ball_shell_mass(p, o, 1.0, x, 1.0, INFINITY).value;
      rep.check("kernels.poisson_mass", tag + " |x|=" + fmt(a), std::abs(m - 1.0), "<=", 1e-6, 0.0);
    }
    double sym = 0.0, scl = 0.0;
    const Point c = Point::unit(p.d, 0, 0.4);
    for (int i = 0; i < 10; ++i) {
      Point x = c, y = c;
      x[0] += 0.3 * std::cos(0.7 * i);
      x[1] += 0.3 * std::sin(0.7 * i);
      y[0] += 0.45 * std::sin(1.3 * i + 0.1);
      y[1] -= 0.2 * std::cos(0.9 * i);
      const double gxy = stable_green_ball(p, c, 0.5, x, y).value, gyx = stable_green_ball(p, c, 0.5, y, x).value;
      const double unit = stable_green_ball(p, o, 1.0, (x - c) * 2.0, (y - c) * 2.0).value;
      sym = std::max(sym, std::abs(gxy - gyx) / gxy);
      scl = std::max(scl, std::abs(gxy - std::pow(0.5, p.alpha - p.d) * unit) / gxy);
    }
    rep.check("kernels.green_symmetry", tag, sym, "<=", 1e-12, 0.0);
    rep.check("kernels.green_scaling", tag, scl, "<=", 1e-10, 0.0);

    boost::math::quadrature::exp_sinh<double> es;
    const double Aw = constant_A(p) * sphere_surface_area(p.d);
    const double tail = es.integrate([&](double t) { return Aw * std::pow(1.0 + t, -1.0 - p.alpha); });
    rep.check("kernels.b_constant", tag, std::abs(constant_B(p) / tail - 1.0), "<=", 1e-8, 0.0);

    const double xi0 = 0.01, xi1 = 200.0;
    const double small = char_exponent_psi(p, xi0).value / (xi0 * xi0 * Aw / (2.0 * p.d * (2.0 - p.alpha)));
    rep.check("kernels.psi_small", tag + " |xi|=0.01", std::abs(small - 1.0), "<=", 0.01, 0.0);
    const double dev = char_exponent_psi(p, xi1).value - std::pow(xi1, p.alpha) + constant_B(p);
    rep.check("kernels.psi_large", tag + " |xi|=200", std::abs(dev), "<=", 1e-2 * std::pow(xi1, p.alpha), 0.0);
  }
  if (with_r0) {
    const ProcessParams& p = s.params;
    const R0Result r = compute_r0_detailed(p);
    // B r0^alpha sup E^z_x tau_{B_1} <= 1/2 gives a conditional gauge of at most 2
    const double g = constant_B(p) * std::pow(r.r0, p.alpha) * r.sup_conditioned;
    rep.check("kernels.r0_condition", "d=" + std::to_string(p.d) + " alpha=" + fmt(p.alpha), g, "<=", 0.5, 1e-9);
    rep.estimate("r0", r.r0, 0.0, 0);
    rep.estimate("khasminskii_radius", r.khasminskii_radius, 0.0, 0);
  }
  return rep;
}

Report verify_wos_oracle(const Scenario& s) {
  const Ball& ball = require_ball(s);
  Knobs k(s.experiment, "experiment");
  const std::vector<double> edges = k.nums("edges", {1.0, 1.02, 1.05, 1.1, 1.2, 1.4, 1.7, 2.2, 3.0, 5.0});
  const Point start = k.point("start", ball.center);
  k.finish();
  if (edges.size() < 2 || edges[0] != 1.0) throw Error(ErrorCode::ConfigError, "'experiment.edges' must start at 1");
  const ProcessParams& p = s.params;
  const double r = ball.radius;
  // annuli [e_i r, e_{i+1} r) and the open last one [e_last r, inf)
  const size_t m = edges.size();
  struct Counts {
    std::vector<long> c;
    void merge(const Counts& o) {
      for (size_t i = 0; i < c.size(); ++i) c[i] += o.c[i];
    }
  };
  Counts proto{std::vector<long>(m, 0)};
  const EstimatorConfig cfg = sub_cfg(s, 0);
  Counts got = run_blocks(s.n, run_options(cfg), proto, [&](long, RngStream& rng, Counts& acc) {
    const Point z = walk_on_spheres_exit(p, s.domain, start, rng);
    const double q = dist(z, ball.center) / r;
    size_t j = m - 1;
    for (size_t i = 0; i + 1 < m; ++i)
      if (q < edges[i + 1]) {
        j = i;
        break;
      }
    ++acc.c[j];
  });
  Report rep(s);
  for (size_t i = 0; i < m; ++i) {
    const double lo = edges[i] * r, hi = i + 1 < m ? edges[i + 1] * r : INFINITY;
    const double exact = poisson_ball_shell_mass(p, ball.center, r, start, lo, hi).value;
    const double ph = double(got.c[i]) / s.n;
    const double se = std::sqrt(exact * (1 - exact) / s.n);
    rep.check("wos.annulus_mass", "[" + fmt(lo) + "," + fmt(hi) + ")", ph, "==", exact, 3 * se);
    rep.estimate("annulus_" + std::to_string(i), ph, std::sqrt(ph * (1 - ph) / s.n), s.n);
  }
  return rep;
}

}  // namespace tsp
