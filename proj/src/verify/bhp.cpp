#include <cmath>
#include <numbers>

#include "common.hpp"
#include "tsp/kernels/r0.hpp"
#include "tsp/verify/experiments.hpp"

namespace tsp {

using namespace vdetail;

namespace {

struct Pair {
  double u = 0, u_se = 0, ratio = 0, ratio_se = 0, identity = 0;
};

}  // namespace

Report verify_bhp_convex(const Scenario& s) {
  require_d2(s);
  const Polytope* poly = std::get_if<Polytope>(&s.domain.variant());
  if (!poly) throw Error(ErrorCode::ConfigError, "experiment '" + s.name + "' needs a polytope domain");
  Knobs k(s.experiment, "experiment");
  const Point Q = k.point("Q", Point{0.5, 0.0});
  const double Lambda = k.num("Lambda", 1.0);
  const double R0 = k.num("R0", 0.5);
  const double r_fraction = k.num("r_fraction", 0.9);
  const std::vector<double> scales = k.nums("scales", {1.0, 0.5});
  const Point u_lo = k.point("u_low", Point{0.0, 0.6}), u_hi = k.point("u_high", Point{0.5, 1.0});
  const Point v_lo = k.point("v_low", Point{0.5, 0.6}), v_hi = k.point("v_high", Point{1.0, 1.0});
  const int rate_grid = static_cast<int>(k.integer("rate_grid", 120));
  const std::vector<double> rho_f = k.nums("grid_radii", {0.2, 0.45, 0.7, 0.95});  // of r/(1+Lambda)
  const std::vector<double> angles = k.nums("grid_angles", {30, 60, 90, 120, 150});
  const std::vector<double> carleson_f = k.nums("carleson_radii", {0.25, 0.5, 0.75, 1.0});  // of 1.5 r
  const int approach = static_cast<int>(k.integer("approach_steps", 6));
  const double delta = k.num("delta_disc", 0.1);
  k.finish();
  if (scales.size() < 2) throw Error(ErrorCode::ConfigError, "'experiment.scales' needs at least two entries");

  // Q on the boundary: one face active, none violated.
  const Halfspace* face = nullptr;
  double worst = -INFINITY;
  for (const auto& f : poly->faces) {
    const double g = f.normal.dot(Q) - f.offset;
    worst = std::max(worst, g);
    if (std::abs(g) <= 1e-9 && !face) face = &f;
  }
  if (!face || worst > 1e-9) throw Error(ErrorCode::NoBoundaryPoint, "Q=" + pt(Q) + " is not on the boundary");
  const Point n_in = face->normal * -1.0;
  const Point tan{n_in[1], -n_in[0]};

  const ProcessParams& p = s.params;
  const double r0 = compute_r0(p);
  const double r3 = std::min(r0, R0) / (6 * (3 + 2 * Lambda));
  const double r_top = r_fraction * r3;
  const double reach = 6 * (3 + 2 * Lambda) * r_top;
  Report rep(s);
  rep.estimate("r0", r0, 0.0, 0);
  rep.estimate("r3", r3, 0.0, 0);

  const AxisBox tu{u_lo, u_hi}, tv{v_lo, v_hi};
  for (const AxisBox* t : {&tu, &tv})
    if (t->distance_to_closed(Q) - reach <= s.est.sim.epsilon)
      throw Error(ErrorCode::ConfigError, "targets must be farther than epsilon from B(Q, 6(3+2 Lambda) r)");
  const Point glo{Q[0] - reach, Q[1] - reach}, ghi{Q[0] + reach, Q[1] + reach};
  auto eu = std::make_shared<JumpRateBox2D>(p, u_lo, u_hi);
  auto ev = std::make_shared<JumpRateBox2D>(p, v_lo, v_hi);
  const GridJumpRate fu(eu, glo, ghi, rate_grid, rate_grid), fv(ev, glo, ghi, rate_grid, rate_grid);
  const GridJumpRate fu2(eu, glo, ghi, rate_grid, rate_grid);

  uint64_t stream = 0;
  double osc_fit = 0.0, carl_fit = 0.0;
  for (size_t si = 0; si < scales.size(); ++si) {
    const double r = scales[si] * r_top;
    const std::string tag = "r=" + fmt(r);
    const DomainShape U = DomainShape::intersect(s.domain, Q, 6 * (3 + 2 * Lambda) * r);
    auto eval = [&](const Point& x) {
      const PathMoments m = compensator_moments(p, U, x, {&fu, &fv, &fu2}, s.n, sub_cfg(s, stream++));
      Pair out;
      out.u = m.mean(0);
      out.u_se = m.stderr_of_mean(0);
      out.ratio = m.ratio(0, 1);
      out.ratio_se = m.ratio_stderr(0, 1);
      out.identity = m.ratio(0, 2);
      return out;
    };
    auto polar = [&](double rho, double deg) {
      const double th = deg * std::numbers::pi / 180.0;
      return Q + tan * (rho * std::cos(th)) + n_in * (rho * std::sin(th));
    };

    // u/v oscillation on D cap B(Q, r/(1+Lambda))
    double mx = -INFINITY, mn = INFINITY, mx_se = 0, mn_se = 0;
    double id_dev = 0.0;
    for (double f : rho_f)
      for (double a : angles) {
        const Point x = polar(f * r / (1 + Lambda), a);
        if (!U.contains(x)) continue;
        const Pair e = eval(x);
        rep.estimate("u/v " + tag + " x=" + pt(x), e.ratio, e.ratio_se, s.n);
        id_dev = std::max(id_dev, std::abs(e.identity - 1.0));
        if (e.ratio > mx) mx = e.ratio, mx_se = e.ratio_se;
        if (e.ratio < mn) mn = e.ratio, mn_se = e.ratio_se;
      }
    const double osc = mx / mn, osc_se = ratio_se(mx, mx_se, mn, mn_se);
    rep.estimate("oscillation " + tag, osc, osc_se, s.n);
    rep.check("bhp.identity_control", tag + " max |u/u - 1|", id_dev, "==", 0.0, 0.0);
    if (si == 0) {
      osc_fit = osc;
      rep.check_true("bhp.oscillation", tag + " fitted oscillation is finite", std::isfinite(osc) && osc >= 1.0);
    } else {
      rep.check("bhp.oscillation", tag + " max/min vs fitted", osc, "<=", osc_fit, 3 * osc_se + delta * osc_fit);
    }

    // Carleson: u(A) against the max of u on D cap B(Q, 3r/2).
    const Point A = Q + n_in * (0.5 * r);
    const Pair ea = eval(A);
    double cmax = 0.0, cmax_se = 0.0;
    for (double f : carleson_f)
      for (double a : angles) {
        const Point x = polar(f * 1.5 * r * 0.98, a);
        if (!U.contains(x)) continue;
        const Pair e = eval(x);
        if (e.u > cmax) cmax = e.u, cmax_se = e.u_se;
      }
    const double carl = ea.u / cmax, carl_se = ratio_se(ea.u, ea.u_se, cmax, cmax_se);
    rep.estimate("u(A) " + tag, ea.u, ea.u_se, s.n);
    rep.estimate("u(A)/max u " + tag, carl, carl_se, s.n);
    if (si == 0) {
      carl_fit = carl;
      rep.check_true("bhp.carleson", tag + " fitted constant is positive", carl > 0.0);
    } else {
      rep.check("bhp.carleson", tag + " u(A)/max vs fitted", carl, ">=", carl_fit, 3 * carl_se + delta * carl_fit);
    }

    // u/v along the inward normal towards Q
    std::vector<Pair> seq;
    for (int j = 1; j <= approach; ++j) {
      const Point x = Q + n_in * (r / (1 + Lambda) * std::ldexp(1.0, -j));
      seq.push_back(eval(x));
      rep.estimate("approach " + tag + " k=" + std::to_string(j), seq.back().ratio, seq.back().ratio_se, s.n);
    }
    for (size_t j = seq.size() >= 3 ? seq.size() - 3 : 0; j + 1 < seq.size(); ++j) {
      const Pair &a = seq[j], &b = seq[j + 1];
      rep.check("bhp.boundary_limit", tag + " k=" + std::to_string(j + 1) + " vs k=" + std::to_string(j + 2),
                std::abs(a.ratio - b.ratio), "<=", 3 * pooled(a.ratio_se, b.ratio_se), delta * a.ratio);
    }
  }
  return rep;
}

}  // namespace tsp
