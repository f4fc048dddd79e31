#include <cmath>

#include "common.hpp"
#include "tsp/kernels/ball.hpp"
#include "tsp/kernels/r0.hpp"
#include "tsp/verify/experiments.hpp"

namespace tsp {

using namespace vdetail;

namespace {

struct Cell {
  size_t index;
  Point lo, hi;
  double g_exact;  // cell average of the stable Green function
};

// Cells at least two widths from the start and from the sphere.
std::vector<Cell> qualifying_cells(const ProcessParams& p, const OccupationGrid& grid, const Point& c, double r,
                                   const Point& x) {
  std::vector<Cell> out;
  const double w = std::max(grid.cell_width(0), grid.cell_width(1));
  for (size_t i = 0; i < grid.size(); ++i) {
    const Point lo = grid.cell_low(i);
    const Point hi{lo[0] + grid.cell_width(0), lo[1] + grid.cell_width(1)};
    double far = 0.0, near2 = 0.0;
    for (int a = 0; a < 2; ++a) {
      const double f = std::max(std::abs(lo[a] - c[a]), std::abs(hi[a] - c[a]));
      far += f * f;
      const double d = std::max({lo[a] - x[a], 0.0, x[a] - hi[a]});
      near2 += d * d;
    }
    if (std::sqrt(far) > r - 2 * w || std::sqrt(near2) < 2 * w) continue;
    const double g = green_ball_box_integral(p, c, r, x, lo, hi).value / grid.cell_volume();
    out.push_back({i, lo, hi, g});
  }
  return out;
}

}  // namespace

Report verify_g1(const Scenario& s) {
  require_d2(s);
  const Ball& ball = require_ball(s);
  Knobs k(s.experiment, "experiment");
  const std::vector<double> scales = k.nums("scales", {1.0, 0.5});
  const int cells = static_cast<int>(k.integer("cells_per_axis", 16));
  const Point start_frac = k.point("start", Point{0.0, 0.0});  // in units of the radius
  const double lower = k.num("lower_constant", 1.0), upper = k.num("upper_constant", 2.0);
  const double delta = k.num("delta_disc", 0.1);
  const double control_upper = k.num("control_upper_constant", 1.0);
  const bool gates = k.flag("gates", true);
  const long gate_n = k.integer("gate_n", s.n);
  const double gate_width = k.num("gate_pooled_se", 2.0);
  k.finish();
  if (scales.empty()) throw Error(ErrorCode::ConfigError, "'experiment.scales' is empty");

  const ProcessParams& p = s.params;
  const double r0 = compute_r0(p);
  Report rep(s);
  rep.estimate("r0", r0, 0.0, 0);
  uint64_t stream = 0;

  for (size_t si = 0; si < scales.size(); ++si) {
    const double r = scales[si] * ball.radius;
    if (!(r < r0))
      throw Error(ErrorCode::RadiusTooLarge, "ball radius " + fmt(r) + " is not below r0 = " + fmt(r0));
    const Point& c = ball.center;
    const Point x = c + start_frac * r;
    const auto D = DomainShape::ball(c, r);
    const auto grid = OccupationGrid::uniform(Point{c[0] - r, c[1] - r}, Point{c[0] + r, c[1] + r}, cells);
    const auto qual = qualifying_cells(p, grid, c, r, x);
    const std::string tag = "r=" + fmt(r);

    const GreenDensity g = green_density(p, D, x, grid, s.n, sub_cfg(s, stream++));
    rep.estimate("exit_time " + tag, g.exit_time);
    long control_failures = 0;
    for (const auto& q : qual) {
      const MCEstimate& e = g.cells[q.index];
      const double ratio = e.mean / q.g_exact, se = e.std_error / q.g_exact;
      const std::string where = tag + " cell " + pt(q.lo);
      rep.check("g1.lower", where, ratio, ">=", lower, 3 * se + delta);
      rep.check("g1.upper", where, ratio, "<=", upper, 3 * se + delta);
      control_failures += ratio > control_upper + 3 * se;
    }
    rep.check("g1.control_rejects", tag + " upper constant " + fmt(control_upper) + " without margin",
              double(control_failures), ">=", 1.0, 0.0);
    rep.estimate("qualifying_cells " + tag, double(qual.size()), 0.0, 0);

    if (si != 0 || !gates) continue;
    // Gates: exit time and occupation of the qualifying region under eps/2 and h/2.
    std::vector<char> in_region(grid.size(), 0);
    for (const auto& q : qual) in_region[q.index] = 1;
    FunctionRate occupation([&grid, &in_region](const Point& y) {
      const long i = grid.cell_index(y);
      return i >= 0 && in_region[static_cast<size_t>(i)] ? 1.0 : 0.0;
    });
    CompensatorOptions opt;
    opt.with_exit_time = true;
    auto summary = [&](EstimatorConfig cfg) {
      PathMoments m = compensator_moments(p, D, x, {&occupation}, gate_n, cfg, opt);
      return std::pair<MCEstimate, MCEstimate>{estimate_from(m, 1, cfg.sim.seed), estimate_from(m, 0, cfg.sim.seed)};
    };
    EstimatorConfig base = sub_cfg(s, stream++);
    auto b = summary(base);
    EstimatorConfig he = sub_cfg(s, stream++);
    he.sim.epsilon *= 0.5;
    auto e2 = summary(he);
    EstimatorConfig hh = sub_cfg(s, stream++);
    hh.sim.time_step *= 0.5;
    auto h2 = summary(hh);
    rep.estimate("gate base exit_time", b.first);
    rep.estimate("gate base occupation", b.second);
    rep.estimate("gate eps/2 exit_time", e2.first);
    rep.estimate("gate eps/2 occupation", e2.second);
    rep.estimate("gate h/2 exit_time", h2.first);
    rep.estimate("gate h/2 occupation", h2.second);
    auto gate = [&](const char* id, const char* what, const MCEstimate& a, const MCEstimate& z) {
      rep.check(id, std::string(what) + " " + tag, std::abs(a.mean - z.mean), "<=",
                gate_width * pooled(a.std_error, z.std_error), 0.0);
    };
    gate("g1.gate_epsilon", "exit_time", b.first, e2.first);
    gate("g1.gate_epsilon", "occupation", b.second, e2.second);
    gate("g1.gate_h", "exit_time", b.first, h2.first);
    gate("g1.gate_h", "occupation", b.second, h2.second);
  }
  return rep;
}

}  // namespace tsp
