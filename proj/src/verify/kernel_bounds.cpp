#include <cmath>
#include <numbers>

#include "common.hpp"
#include "tsp/kernels/ball.hpp"
#include "tsp/kernels/r0.hpp"
#include "tsp/verify/experiments.hpp"

namespace tsp {

using namespace vdetail;

namespace {

struct PolarCell {
  double rho_lo, rho_hi, th_lo, th_hi;
  bool shell;
};

struct Acc {
  std::vector<long> inner;            // direct exit counts per inner cell
  std::vector<double> sum, sumsq;     // compensator integrals per shell cell
  long n = 0, beyond = 0;
  void merge(const Acc& o) {
    for (size_t i = 0; i < inner.size(); ++i) inner[i] += o.inner[i];
    for (size_t i = 0; i < sum.size(); ++i) {
      sum[i] += o.sum[i];
      sumsq[i] += o.sumsq[i];
    }
    n += o.n;
    beyond += o.beyond;
  }
};

struct ShellObserver {
  const std::vector<std::unique_ptr<GridJumpRate>>* fields;
  std::vector<double> acc;
  void on_step(const Point& y, double dt) {
    for (size_t j = 0; j < fields->size(); ++j) acc[j] += (*fields)[j]->rate(y) * dt;
  }
};

struct CellEstimate {
  double mass = 0, se = 0, exact = 0;
};

}  // namespace

Report verify_kernel_bounds(const Scenario& s) {
  require_d2(s);
  const Ball& ball = require_ball(s);
  Knobs k(s.experiment, "experiment");
  const std::vector<double> scales = k.nums("scales", {1.0, 0.5, 0.25});
  const int sectors = static_cast<int>(k.integer("sectors", 8));
  const int inner_bins = static_cast<int>(k.integer("inner_bins", 8));
  // shell radial edges 1 + t r
  const std::vector<double> shell_t = k.nums("shell_edges", {-1.0, -0.5, 0.0, 0.25, 0.5});
  const double second_start = k.num("second_start", 0.125);  // x0 + f r e1
  const double delta = k.num("delta_disc", 0.1);
  const double contraction = k.num("contraction", 0.75);  // allowed |step_i| / |step_{i-1}|
  const int grid_nodes = static_cast<int>(k.integer("rate_grid", 24));
  k.finish();
  const ProcessParams& p = s.params;
  const double r0 = compute_r0(p);
  const Point& x0 = ball.center;
  const double two_pi = 2 * std::numbers::pi;
  Report rep(s);
  rep.estimate("r0", r0, 0.0, 0);

  double c_lo = 0, c_hi = 0;
  std::vector<double> q_lo, q_hi, q_lo_se, q_hi_se;
  uint64_t stream = 0;
  for (size_t si = 0; si < scales.size(); ++si) {
    const double r = scales[si] * ball.radius;
    if (!(r < std::min(0.25, r0)))
      throw Error(ErrorCode::RadiusTooLarge, "ball radius " + fmt(r) + " is not below min(1/4, r0)");
    const std::string tag = "r=" + fmt(r);
    const auto D = DomainShape::ball(x0, r);

    std::vector<PolarCell> cells;
    const double q = std::pow((1 - r) / r, 1.0 / inner_bins);
    for (int i = 0; i < inner_bins; ++i)
      for (int j = 0; j < sectors; ++j)
        cells.push_back({r * std::pow(q, i), i + 1 == inner_bins ? 1 - r : r * std::pow(q, i + 1),
                         two_pi * j / sectors, two_pi * (j + 1) / sectors, false});
    const size_t n_inner = cells.size();
    for (size_t i = 0; i + 1 < shell_t.size(); ++i)
      for (int j = 0; j < sectors; ++j)
        cells.push_back({1 + shell_t[i] * r, 1 + shell_t[i + 1] * r, two_pi * j / sectors,
                         two_pi * (j + 1) / sectors, true});

    std::vector<std::unique_ptr<GridJumpRate>> fields;
    for (size_t c = n_inner; c < cells.size(); ++c) {
      auto exact = std::make_shared<JumpRatePolarCell2D>(p, x0, cells[c].rho_lo, cells[c].rho_hi, cells[c].th_lo,
                                                         cells[c].th_hi);
      fields.push_back(std::make_unique<GridJumpRate>(exact, Point{x0[0] - r, x0[1] - r},
                                                      Point{x0[0] + r, x0[1] + r}, grid_nodes, grid_nodes));
    }

    std::vector<CellEstimate> at_center;
    for (int start = 0; start < 2; ++start) {
      const Point x = start == 0 ? x0 : x0 + Point::unit(2, 0, second_start * r);
      const EstimatorConfig cfg = sub_cfg(s, stream++);
      Acc proto;
      proto.inner.assign(n_inner, 0);
      proto.sum.assign(fields.size(), 0.0);
      proto.sumsq.assign(fields.size(), 0.0);
      Acc a = run_blocks(s.n, run_options(cfg), proto, [&](long, RngStream& rng, Acc& acc) {
        ShellObserver obs{&fields, std::vector<double>(fields.size(), 0.0)};
        const ExitRecord rec = simulate_exit(p, D, x, cfg.sim, rng, obs);
        if (rec.censored) return;
        ++acc.n;
        for (size_t j = 0; j < fields.size(); ++j) {
          acc.sum[j] += obs.acc[j];
          acc.sumsq[j] += obs.acc[j] * obs.acc[j];
        }
        const double dx = rec.exit_position[0] - x0[0], dy = rec.exit_position[1] - x0[1];
        const double rho = std::sqrt(dx * dx + dy * dy);
        if (rho >= 1 + r) ++acc.beyond;
        double th = std::atan2(dy, dx);
        if (th < 0) th += two_pi;
        for (size_t c = 0; c < n_inner; ++c)
          if (rho >= cells[c].rho_lo && rho < cells[c].rho_hi && th >= cells[c].th_lo && th < cells[c].th_hi) {
            ++acc.inner[c];
            break;
          }
      });
      if (a.n == 0) throw Error(ErrorCode::AllPathsCensored, "every path hit max_time");
      const std::string where = tag + (start == 0 ? " x=x0" : " x=x0+" + fmt(second_start) + "r e1");
      rep.check("kernel_bounds.beyond_range", where + " exits beyond 1+r", double(a.beyond), "==", 0.0, 0.0);

      std::vector<CellEstimate> est(cells.size());
      for (size_t c = 0; c < cells.size(); ++c) {
        CellEstimate& e = est[c];
        if (c < n_inner) {
          e.mass = double(a.inner[c]) / a.n;
          e.se = std::sqrt(e.mass * (1 - e.mass) / a.n);
        } else {
          const size_t j = c - n_inner;
          e.mass = a.sum[j] / a.n;
          e.se = std::sqrt(std::max(0.0, a.sumsq[j] / a.n - e.mass * e.mass) / std::max(1L, a.n - 1));
        }
        e.exact = poisson_ball_cell_mass(p, x0, r, x, cells[c].rho_lo, cells[c].rho_hi, cells[c].th_lo,
                                         cells[c].th_hi)
                      .value;
      }
      if (start == 0) {
        at_center = est;
        double lo = INFINITY, hi = 0, se_lo = 0, se_hi = 0;
        for (size_t c = 0; c < cells.size(); ++c) {
          const CellEstimate& e = est[c];
          const std::string cw = tag + " cell [" + fmt(cells[c].rho_lo) + "," + fmt(cells[c].rho_hi) + ")x[" +
                                 fmt(cells[c].th_lo) + "," + fmt(cells[c].th_hi) + ")";
          const double ratio = e.mass / e.exact, rse = e.se / e.exact;
          if (!cells[c].shell) rep.check("kernel_bounds.inner_lower", cw, ratio, ">=", 1.0, 3 * rse + delta);
          rep.check("kernel_bounds.upper_two", cw, ratio, "<=", 2.0, 3 * rse + delta);
          if (cells[c].shell) {
            const double area = 0.5 * (cells[c].th_hi - cells[c].th_lo) *
                                (cells[c].rho_hi * cells[c].rho_hi - cells[c].rho_lo * cells[c].rho_lo);
            const double v = e.mass / area / std::pow(r, p.alpha), vse = e.se / area / std::pow(r, p.alpha);
            if (v < lo) lo = v, se_lo = vse;
            if (v > hi) hi = v, se_hi = vse;
          }
        }
        rep.estimate("shell density / r^alpha min " + tag, lo, se_lo, a.n);
        rep.estimate("shell density / r^alpha max " + tag, hi, se_hi, a.n);
        if (si == 0) {
          c_lo = lo;
          c_hi = hi;
          rep.check_true("kernel_bounds.shell_bracket", tag + " fitted lower constant is positive", lo > 0.0);
        } else {
          rep.check("kernel_bounds.shell_bracket", tag + " max vs fitted", hi, "<=", c_hi, 3 * se_hi + delta * c_hi);
          rep.check("kernel_bounds.shell_bracket", tag + " min vs fitted", lo, ">=", c_lo, 3 * se_lo + delta * c_lo);
        }
      } else {
        // K^Y(x_b, z) / K(x0, z) over z in A(x0, r, 1 + r/2)
        double lo = INFINITY, hi = 0, se_lo = 0, se_hi = 0;
        for (size_t c = 0; c < cells.size(); ++c) {
          if (cells[c].rho_hi > 1 + 0.5 * r + 1e-12) continue;
          const double ratio = est[c].mass / at_center[c].exact, rse = est[c].se / at_center[c].exact;
          if (ratio < lo) lo = ratio, se_lo = rse;
          if (ratio > hi) hi = ratio, se_hi = rse;
        }
        rep.estimate("start ratio min " + tag, lo, se_lo, a.n);
        rep.estimate("start ratio max " + tag, hi, se_hi, a.n);
        q_lo.push_back(lo), q_lo_se.push_back(se_lo), q_hi.push_back(hi), q_hi_se.push_back(se_hi);
        if (si == 0)
          rep.check_true("kernel_bounds.start_comparability", tag + " fitted lower constant is positive", lo > 0.0);
      }
    }
  }
  // The extremes move by O(r) as r shrinks; a uniform constant needs the steps to contract.
  auto steps = [&](const std::vector<double>& v, const std::vector<double>& se, const char* side) {
    for (size_t i = 2; i < v.size(); ++i) {
      const double prev = std::abs(v[i - 1] - v[i - 2]), cur = std::abs(v[i] - v[i - 1]);
      rep.check("kernel_bounds.start_comparability",
                std::string(side) + " step at r=" + fmt(scales[i] * ball.radius) + " vs previous step", cur, "<=",
                contraction * prev, 3 * (pooled(se[i], se[i - 1]) + contraction * pooled(se[i - 1], se[i - 2])));
    }
  };
  steps(q_lo, q_lo_se, "min");
  steps(q_hi, q_hi_se, "max");
  if (q_lo.size() >= 2) {
    const size_t m = q_lo.size() - 1;
    const double limit = q_lo[m] - std::abs(q_lo[m] - q_lo[m - 1]) * contraction / (1 - contraction);
    rep.estimate("start ratio min extrapolated", limit, 0.0, 0);
    rep.check("kernel_bounds.start_comparability", "extrapolated min as r -> 0 stays positive", limit, ">=", 0.0,
              0.0);
  }
  return rep;
}

}  // namespace tsp
