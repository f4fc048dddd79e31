#include <cmath>

#include "common.hpp"
#include "tsp/kernels/r0.hpp"
#include "tsp/verify/experiments.hpp"

namespace tsp {

using namespace vdetail;

Report verify_harnack(const Scenario& s) {
  require_d2(s);
  const Ball& ball = require_ball(s);
  Knobs k(s.experiment, "experiment");
  const std::vector<double> scales = k.nums("scales", {1.0, 0.5});
  const std::vector<double> Ms = k.nums("M", {1.0, 2.0, 4.0});
  const double spread = k.num("spread", 0.9);  // |x1 - x2| = spread M r
  const Point t_lo = k.point("target_low", Point{0.5, -0.15});
  const Point t_hi = k.point("target_high", Point{0.8, 0.15});
  const double delta = k.num("delta_disc", 0.1);
  const double grid_h = k.num("rate_grid_spacing", 0.005);
  const double control_scale = k.num("control_scale", 0.25);
  const double control_factor = k.num("control_factor", 1.1);
  const long control_n = k.integer("control_n", std::min(s.n, 20000L));
  k.finish();
  if (Ms.empty() || scales.empty()) throw Error(ErrorCode::ConfigError, "'experiment.M' and 'scales' must be non-empty");

  const ProcessParams& p = s.params;
  const double da = p.d + p.alpha;
  const Point& c = ball.center;
  Report rep(s);
  const double r0 = compute_r0(p);
  rep.estimate("r0", r0, 0.0, 0);

  auto exact = std::make_shared<JumpRateBox2D>(p, t_lo, t_hi);
  double reach = 0.0;
  for (double sc : scales)
    for (double M : Ms) reach = std::max(reach, 0.5 * spread * M * sc * ball.radius + sc * ball.radius);
  if (t_lo[0] - (c[0] + reach) <= s.est.sim.epsilon && c[0] - reach - t_hi[0] <= s.est.sim.epsilon &&
      t_lo[1] - (c[1] + reach) <= s.est.sim.epsilon && c[1] - reach - t_hi[1] <= s.est.sim.epsilon)
    throw Error(ErrorCode::ConfigError, "target box must be farther than epsilon from every ball union");
  const int nx = std::max(4, static_cast<int>(std::ceil(2 * reach / grid_h)));
  GridJumpRate field(exact, Point{c[0] - reach, c[1] - reach}, Point{c[0] + reach, c[1] + reach}, nx, nx);

  uint64_t stream = 0;
  double J = 0.0;
  for (size_t si = 0; si < scales.size(); ++si) {
    const double r = scales[si] * ball.radius;
    for (size_t mi = 0; mi < Ms.size(); ++mi) {
      const double M = Ms[mi];
      const Point x1 = c - Point::unit(2, 0, 0.5 * spread * M * r), x2 = c + Point::unit(2, 0, 0.5 * spread * M * r);
      EstimatorConfig cfg = sub_cfg(s, stream++);
      const HarnackResult h = harnack_ratio_profile(p, x1, x2, r, field, s.n, cfg);
      const std::string tag = "r=" + fmt(r) + " M=" + fmt(M);
      rep.estimate("u(x1) " + tag, h.u1);
      rep.estimate("u(x2) " + tag, h.u2);
      rep.estimate("ratio " + tag, h.ratio, h.std_error, h.u1.n);
      if (si == 0 && mi == 0) {
        J = std::max(h.ratio, 1.0 / h.ratio);
        rep.estimate("fitted J", J, 0.0, 0);
      }
      const double up = h.ratio * std::pow(M, -da), up_se = h.std_error * std::pow(M, -da);
      const double lo = h.ratio * std::pow(M, da), lo_se = h.std_error * std::pow(M, da);
      rep.check("harnack.upper", tag + " ratio M^-(d+alpha)", up, "<=", J, 3 * up_se + delta * J);
      rep.check("harnack.lower", tag + " ratio M^(d+alpha)", lo, ">=", 1.0 / J, 3 * lo_se + delta / J);
    }
  }

  {
    const double r = scales[0] * ball.radius;
    const HarnackResult h =
        harnack_ratio_profile(p, c, c, r, field, std::min(s.n, 2000L), sub_cfg(s, stream++));
    rep.check("harnack.diagonal", "x1 = x2", h.ratio, "==", 1.0, 0.0);
  }

  // Beyond the cap: the target is within jump range of B(x1, r) only.
  {
    const double r = control_scale * ball.radius;
    const double cap = 1.0 / r - 0.5, M = control_factor * cap;
    const Point x1 = c - Point::unit(2, 0, 0.5 * M * r), x2 = c + Point::unit(2, 0, 0.5 * M * r);
    bool guarded = false;
    try {
      harnack_ratio_profile(p, x1, x2, r, field, 1, sub_cfg(s, stream));
    } catch (const Error& e) {
      guarded = e.code() == ErrorCode::CapViolated;
    }
    rep.check_true("harnack.cap_guard", "M=" + fmt(M) + " above cap " + fmt(cap) + " is rejected", guarded);
    const Point lo{x1[0] - 0.9, c[1] - 0.1}, hi{x1[0] - 0.5, c[1] + 0.1};
    auto ctl_exact = std::make_shared<JumpRateBox2D>(p, lo, hi);
    GridJumpRate ctl(ctl_exact, Point{x1[0] - r, x1[1] - r}, Point{x1[0] + r, x1[1] + r}, 24, 24);
    EstimatorConfig cfg = sub_cfg(s, stream++);
    const HarnackResult h = harnack_values(p, x1, x2, r, &ctl, nullptr, control_n, cfg);
    const std::string tag = "r=" + fmt(r) + " M=" + fmt(M) + " (cap " + fmt(cap) + ")";
    rep.estimate("control u(x1) " + tag, h.u1);
    rep.estimate("control u(x2) " + tag, h.u2);
    rep.check("harnack.beyond_cap", tag + " u(x2) is exactly zero", h.u2.mean, "==", 0.0, 0.0);
    rep.check("harnack.beyond_cap", tag + " u(x1) is positive", h.u1.mean, ">=", 3 * h.u1.std_error, 0.0);
  }
  return rep;
}

}  // namespace tsp
