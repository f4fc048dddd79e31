#include <cmath>

#include "common.hpp"
#include "tsp/kernels/r0.hpp"
#include "tsp/verify/experiments.hpp"

namespace tsp {

using namespace vdetail;

namespace {

struct Extreme {
  double value = 0.0, se = 0.0;
  Point at;
};

}  // namespace

Report verify_exit_bound(const Scenario& s) {
  Knobs k(s.experiment, "experiment");
  const double r1 = k.num("r", 0.125);
  const std::vector<double> scales = k.nums("scales", {1.0, 0.5, 0.25});
  const double grid_step = k.num("grid_step", 1.0 / 6.0);  // in units of r
  const double grid_radius = k.num("grid_radius", 0.45);   // in units of r
  const double delta = k.num("delta_disc", 0.1);
  const std::vector<double> kappas = k.nums("kappa", {0.5, 0.25});
  const std::vector<double> kappa_starts = k.nums("kappa_starts", {0.6, 0.8});  // |x| / r
  const long kappa_n = k.integer("kappa_n", s.n);
  k.finish();
  if (scales.size() < 2) throw Error(ErrorCode::ConfigError, "'experiment.scales' needs at least two entries");
  if (!(r1 > 0.0 && r1 < 1.0)) throw Error(ErrorCode::ParamOutOfRange, "'experiment.r' must lie in (0, 1)");

  const ProcessParams& p = s.params;
  const int d = p.d;
  const Point o = Point::zeros(d);
  const BoundingBall bb = s.domain.bounding_ball();
  if (dist(bb.center, o) + bb.radius > r1 * (1 + 1e-12))
    throw Error(ErrorCode::ConfigError, "domain is not inside B(0, r) with r = " + fmt(r1));
  Report rep(s);
  uint64_t stream = 0;

  // Grid points x in D with |x| <= grid_radius r (d = 2 plane through the first two axes in higher d).
  std::vector<Extreme> maxima;
  for (double sc : scales) {
    const double r = sc * r1;
    const DomainShape D = s.domain.scaled(sc);
    const std::string tag = "r=" + fmt(r);
    const int m = static_cast<int>(std::floor(grid_radius / grid_step));
    Extreme best;
    bool any = false;
    for (int i = -m; i <= m; ++i)
      for (int j = -m; j <= m; ++j) {
        Point x = o;
        x[0] = i * grid_step * r;
        x[1] = j * grid_step * r;
        if (x.norm() > grid_radius * r || !D.contains(x)) continue;
        CompensatorOptions opt;
        opt.with_exit_time = true;
        opt.hit_targets.push_back(TargetSet::predicate(
            "outside B(0,r)", [r](const Point& y) { return y.norm() >= r; }));
        const EstimatorConfig cfg = sub_cfg(s, stream++);
        const PathMoments mo = compensator_moments(p, D, x, {}, s.n, cfg, opt);
        const double ratio = std::pow(r, p.alpha) * mo.ratio(1, 0);
        const double se = std::pow(r, p.alpha) * mo.ratio_stderr(1, 0);
        const std::string where = tag + " x=" + pt(x);
        rep.estimate("ratio " + where, ratio, se, mo.n);
        rep.check("exit_bound.positive", where, ratio, ">=", 3 * se, 0.0);
        if (!std::isfinite(ratio)) rep.check_true("exit_bound.positive", where + " finite", false);
        if (!any || ratio > best.value) best = {ratio, se, x};
        any = true;
      }
    if (!any) throw Error(ErrorCode::ConfigError, "no grid point of the domain at " + tag);
    rep.estimate("max ratio " + tag, best.value, best.se, s.n);
    maxima.push_back(best);
  }
  for (size_t i = 1; i < maxima.size(); ++i) {
    const Extreme &a = maxima[0], &b = maxima[i];
    rep.check("exit_bound.scale_stability", "max ratio r=" + fmt(scales[i] * r1) + " vs r=" + fmt(scales[0] * r1),
              std::abs(b.value - a.value), "<=", 3 * pooled(a.se, b.se), delta * a.value);
  }

  // Inner ball B(0, kappa r) inside B(0, r): hitting it before leaving vs kappa^d r^-alpha E tau_B(0,r).
  const double r0 = compute_r0(p);
  rep.estimate("r0", r0, 0.0, 0);
  if (!(r1 < r0)) throw Error(ErrorCode::RadiusTooLarge, "r = " + fmt(r1) + " is not below r0 = " + fmt(r0));
  const DomainShape outer = DomainShape::ball(o, r1);
  double C = 0.0;
  for (size_t ki = 0; ki < kappas.size(); ++ki) {
    const double kap = kappas[ki];
    const DomainShape ring = DomainShape::annulus(o, kap * r1, r1);
    const TargetSet hole = TargetSet::annulus(o, 0.0, kap * r1);
    double lo = INFINITY, lo_se = 0.0;
    for (double f : kappa_starts) {
      const Point x = Point::unit(d, 0, f * r1);
      if (!ring.contains(x)) throw Error(ErrorCode::ConfigError, "kappa start " + fmt(f) + " is not in the ring");
      const MCEstimate hit = harmonic_measure(p, ring, x, hole, kappa_n, sub_cfg(s, stream++));
      const MCEstimate tau = mean_exit_time(p, outer, x, kappa_n, sub_cfg(s, stream++));
      const double scale = std::pow(r1, p.alpha) / std::pow(kap, d);
      const double R = scale * hit.mean / tau.mean;
      const double se = scale * ratio_se(hit.mean, hit.std_error, tau.mean, tau.std_error);
      const std::string where = "kappa=" + fmt(kap) + " |x|=" + fmt(f) + "r";
      rep.estimate("hit " + where, hit);
      rep.estimate("exit_time " + where, tau);
      rep.estimate("R " + where, R, se, hit.n);
      if (R < lo) lo = R, lo_se = se;
    }
    if (ki == 0) {
      C = lo;
      rep.estimate("fitted C", C, lo_se, kappa_n);
      rep.check_true("exit_bound.kappa_scaling", "kappa=" + fmt(kap) + " fitted constant is positive", C > 0.0);
    } else {
      rep.check("exit_bound.kappa_scaling", "kappa=" + fmt(kap) + " min R vs fitted", lo, ">=", C,
                3 * lo_se + delta * C);
    }
  }
  return rep;
}

}  // namespace tsp
