#include <cmath>
#include <numbers>

#include "common.hpp"
#include "tsp/verify/experiments.hpp"

namespace tsp {

using namespace vdetail;

namespace {

struct RateObserver {
  const JumpRateField* field;
  double acc = 0.0;
  void on_step(const Point& y, double dt) { acc += field->rate(y) * dt; }
};

// Compensator moments plus the number of paths with a positive integral.
struct Tally {
  PathMoments m{1};
  long positive = 0;
  void merge(const Tally& o) {
    m.merge(o.m);
    positive += o.positive;
  }
};

Tally run_tally(const ProcessParams& p, const DomainShape& U, const Point& x, const JumpRateField& f, long n,
                const EstimatorConfig& cfg) {
  return run_blocks(n, run_options(cfg), Tally{}, [&](long, RngStream& rng, Tally& t) {
    RateObserver obs{&f};
    const ExitRecord rec = simulate_exit(p, U, x, cfg.sim, rng, obs);
    if (rec.censored) {
      t.m.add_censored();
      return;
    }
    t.m.add(&obs.acc);
    t.positive += obs.acc > 0.0;
  });
}

}  // namespace

Report counterexample_experiment(const Scenario& s) {
  require_d2(s);
  Knobs k(s.experiment, "experiment");
  const double r1 = k.num("r1", 0.2);
  const double M1 = k.num("M1", 2.0);
  const long n_lo = k.integer("n_from", 3), n_hi = k.integer("n_to", 8);
  const std::vector<double> radii = k.nums("grid_radii", {0.25, 0.5, 0.75});  // of r1
  const std::vector<double> angles = k.nums("grid_angles", {45, 90, 135});
  const std::vector<double> heights = k.nums("dn_heights", {0.125, 0.25, 0.5, 0.75});  // of eta_n
  const std::vector<double> offsets = k.nums("dn_offsets", {0.0, 0.0625});           // of r1
  const long min_positive = k.integer("min_positive", 100);
  const long max_paths = k.integer("max_paths", 16 * s.n);
  const int gx = static_cast<int>(k.integer("rate_grid_x", 80)), gy = static_cast<int>(k.integer("rate_grid_y", 40));
  k.finish();
  if (!(M1 > 1.0)) throw Error(ErrorCode::ConfigError, "'experiment.M1' must exceed 1");
  if (!(r1 > 0.0 && r1 < 0.5 / M1)) throw Error(ErrorCode::ConfigError, "'experiment.r1' must lie in (0, 1/(2 M1))");
  if (n_lo < 1 || n_hi <= n_lo) throw Error(ErrorCode::ConfigError, "'experiment.n_from' < 'n_to' required");

  const ProcessParams& p = s.params;
  const DomainShape U = DomainShape::intersect(s.domain, Point{0.0, 0.0}, M1 * r1);
  const Point A{0.0, 0.5 * r1};
  Report rep(s);
  uint64_t stream = 0;
  std::vector<double> ratio, rse;

  for (long n = n_lo; n <= n_hi; ++n) {
    const CnSet cn(2, r1, static_cast<int>(n));
    const DnSet dn(2, r1, static_cast<int>(n));
    const double eta = std::ldexp(r1 * r1, -static_cast<int>(n));  // height of D_n above the boundary
    const std::string tag = "n=" + std::to_string(n);
    auto exact = std::make_shared<JumpRateBox2D>(p, Point{-cn.half_width(), -100.0}, Point{cn.half_width(), cn.top()}, 1e-7);
    // the rate vanishes beyond |x1| = r1/8 + sqrt(2 eta)
    const double wx = 1.05 * (cn.half_width() + std::sqrt(2 * eta));
    const GridJumpRate field(exact, Point{-wx, 0.0}, Point{wx, eta}, gx, gy);

    // u_n(A) with the path count doubled until enough paths reach D_n.
    EstimatorConfig cfg = sub_cfg(s, stream++);
    Tally ta = run_tally(p, U, A, field, s.n, cfg);
    long used = s.n;
    while (ta.positive < min_positive && used < max_paths) {
      const long more = std::min(used, max_paths - used);
      EstimatorConfig c2 = cfg;
      c2.stream_offset += static_cast<uint64_t>(used);
      ta.merge(run_tally(p, U, A, field, more, c2));
      used += more;
    }
    const MCEstimate uA = estimate_from(ta.m, 0, cfg.sim.seed);
    rep.estimate("u(A) " + tag, uA);
    rep.estimate("positive paths " + tag, double(ta.positive), 0.0, uA.n);
    rep.check("counterexample.reachability", tag + " paths from A with a positive integral", double(ta.positive),
              ">=", double(min_positive), 0.0);

    std::vector<Point> grid;
    for (double f : radii)
      for (double a : angles) {
        const double th = a * std::numbers::pi / 180.0;
        grid.push_back(Point{f * r1 * std::cos(th), f * r1 * std::sin(th)});
      }
    for (double off : offsets)
      for (double h : heights) grid.push_back(Point{off * r1, h * eta});
    double S = -1.0, S_se = 0.0;
    Point at;
    for (const Point& x : grid) {
      if (!U.contains(x)) continue;
      const Tally t = run_tally(p, U, x, field, s.n, sub_cfg(s, stream++));
      const MCEstimate e = estimate_from(t.m, 0, cfg.sim.seed);
      rep.estimate("u " + tag + " x=" + pt(x), e);
      if (e.mean > S) S = e.mean, S_se = e.std_error, at = x;
    }
    rep.estimate("S " + tag, S, S_se, s.n);
    rep.check_true("counterexample.max_in_dn", tag + " grid maximum at " + pt(at) + " lies in D_n", dn.contains(at));
    ratio.push_back(uA.mean / S);
    rse.push_back(ratio_se(uA.mean, uA.std_error, S, S_se));
    rep.estimate("ratio " + tag, ratio.back(), rse.back(), uA.n);
  }
  for (size_t i = 0; i + 1 < ratio.size(); ++i) {
    const std::string w = "n=" + std::to_string(n_lo + long(i) + 1) + " vs n=" + std::to_string(n_lo + long(i));
    rep.check("counterexample.monotone", w + " ratio increase", ratio[i + 1] - ratio[i], "<=",
              2 * pooled(rse[i], rse[i + 1]), 0.0);
  }
  rep.check("counterexample.collapse", "ratio at n=" + std::to_string(n_hi) + " vs a quarter of n=" +
                                           std::to_string(n_lo),
            ratio.back(), "<=", ratio.front() / 4.0, 0.0);
  return rep;
}

}  // namespace tsp
