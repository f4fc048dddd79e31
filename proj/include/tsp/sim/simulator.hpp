#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "tsp/core.hpp"
#include "tsp/domains/domain.hpp"
#include "tsp/sim/rng.hpp"

namespace tsp {

struct SimConfig {
  double epsilon = 1e-3;    // jump cutoff
  double time_step = 1e-3;  // h
  double max_time = 1e3;
  uint64_t seed = 1;
  bool boundary_refine = true;
  // Skip the Gaussian substitute for jumps below epsilon (bias comparison).
  bool drop_small_jumps = false;
  // When > 0, the cutoff near the boundary is min(epsilon, factor * boundary_distance),
  // so jumps resolve the boundary layer instead of the Gaussian substitute.
  double epsilon_boundary_factor = 0.0;
  double min_epsilon = 1e-9;
  // Floor on the refined step, relative to time_step.
  double min_step_fraction = 1e-4;
  void validate() const;
};

struct ExitRecord {
  Point exit_position;
  double exit_time = 0.0;
  bool by_jump = false;
  Point last_interior;
  bool censored = false;
};

// A omega_{d-1} (eps^{-alpha} - 1) / alpha.
double jump_rate(const ProcessParams& p, double epsilon);
// sigma with sigma^2 = A omega_{d-1} eps^{2-alpha} / (d (2-alpha)).
double small_jump_std(const ProcessParams& p, double epsilon);
Point sample_truncated_jump(const ProcessParams& p, double epsilon, RngStream& rng);

// Uniform direction on the unit sphere from d normals.
Point sample_direction(int d, RngStream& rng);

namespace sim_detail {

struct NoObserver {
  void on_step(const Point&, double) {}
};

struct Rates {
  double lambda = 0.0, sigma = 0.0, eps = 0.0;
};

Rates rates(const ProcessParams& p, double eps);

template <class Shape, class Observer>
ExitRecord run_path(const ProcessParams& p, const Shape& shape, const Point& start, const SimConfig& cfg,
                    RngStream& rng, Observer& obs) {
  const int d = p.d;
  const double sqrt_d = std::sqrt(static_cast<double>(d));
  const bool adaptive = cfg.epsilon_boundary_factor > 0.0;
  const bool need_dist = adaptive || (cfg.boundary_refine && !cfg.drop_small_jumps);
  const double h_min = cfg.time_step * cfg.min_step_fraction;
  const Rates base = rates(p, cfg.epsilon);
  Rates cur = base;

  ExitRecord rec;
  Point x = start;
  double t = 0.0;
  double budget = rng.exponential();  // hazard left before the next jump
  while (true) {
    if (t >= cfg.max_time) {
      rec.censored = true;
      rec.exit_position = x;
      rec.last_interior = x;
      rec.exit_time = t;
      return rec;
    }
    double dist = 0.0;
    if (need_dist) dist = shape.boundary_distance(x);
    if (adaptive) {
      double e = std::clamp(cfg.epsilon_boundary_factor * dist, cfg.min_epsilon, cfg.epsilon);
      if (e != cur.eps) cur = (e == base.eps) ? base : rates(p, e);
    }
    const double sigma = cfg.drop_small_jumps ? 0.0 : cur.sigma;
    double dt;
    if (sigma == 0.0) {
      dt = std::numeric_limits<double>::infinity();
    } else {
      dt = cfg.time_step;
      if (cfg.boundary_refine) {
        double s = dist / (3.0 * sigma * sqrt_d);
        dt = std::min(dt, std::max(h_min, s * s));
      }
    }
    dt = std::min(dt, cfg.max_time - t);
    const double to_jump = cur.lambda > 0.0 ? budget / cur.lambda : std::numeric_limits<double>::infinity();
    const bool jump = to_jump <= dt;
    if (jump) dt = to_jump;

    // Gaussian kick first, then the position is held for dt and a jump (if the
    // clock fires) leaves from it; the observer sees exactly that held position.
    if (sigma > 0.0 && dt > 0.0) {
      const double s = sigma * std::sqrt(dt);
      Point y = x;
      for (int i = 0; i < d; ++i) y[i] += s * rng.normal();
      if (!shape.contains(y)) {
        rec.exit_position = y;
        rec.last_interior = x;
        rec.exit_time = t;
        rec.by_jump = false;
        return rec;
      }
      x = y;
    }
    obs.on_step(x, dt);
    t += dt;
    if (!jump) {
      budget -= cur.lambda * dt;
      continue;
    }
    Point y = x + sample_truncated_jump(p, cur.eps, rng);
    budget = rng.exponential();
    if (!shape.contains(y)) {
      rec.exit_position = y;
      rec.last_interior = x;
      rec.exit_time = t;
      rec.by_jump = true;
      return rec;
    }
    x = y;
  }
}

}  // namespace sim_detail

// Euler scheme for Y to the first exit from the domain. The observer's
// on_step(position, dt) sees each holding interval; jumps leave from that position,
// so E sum kappa(position) dt is the exact jump-into-target probability of the scheme.
template <class Observer>
ExitRecord simulate_exit(const ProcessParams& p, const DomainShape& domain, const Point& start,
                         const SimConfig& cfg, RngStream& rng, Observer& obs) {
  require_same_dim(start, p.d, "start");
  if (domain.dim() != p.d) throw Error(ErrorCode::DimensionMismatch, "domain dimension differs from d");
  if (!domain.contains_unchecked(start)) throw Error(ErrorCode::PointNotInterior, "start is not in the domain");
  return std::visit([&](const auto& s) { return sim_detail::run_path(p, s, start, cfg, rng, obs); },
                    domain.variant());
}

ExitRecord simulate_exit(const ProcessParams& p, const DomainShape& domain, const Point& start,
                         const SimConfig& cfg, RngStream& rng);

// Regular grid over an axis box; accumulates time per cell.
class OccupationGrid {
 public:
  OccupationGrid() = default;
  OccupationGrid(const Point& low, const Point& high, const std::vector<int>& cells);
  static OccupationGrid uniform(const Point& low, const Point& high, int cells_per_axis);

  int dim() const { return low_.dim(); }
  size_t size() const { return time_.size(); }
  const std::vector<int>& shape() const { return cells_; }
  const Point& low() const { return low_; }
  const Point& high() const { return high_; }
  double cell_volume() const { return volume_; }
  double cell_width(int axis) const { return width_[static_cast<size_t>(axis)]; }
  // -1 outside the grid.
  long cell_index(const Point& x) const;
  Point cell_low(size_t idx) const;
  Point cell_center(size_t idx) const;

  void add(const Point& x, double dt) {
    long i = cell_index(x);
    if (i >= 0) time_[static_cast<size_t>(i)] += dt;
  }
  double time(size_t idx) const { return time_[idx]; }
  const std::vector<double>& times() const { return time_; }
  double total() const;
  void clear();
  void merge(const OccupationGrid& other);
  void on_step(const Point& x, double dt) { add(x, dt); }

 private:
  Point low_, high_;
  std::vector<int> cells_;
  std::vector<double> width_;
  std::vector<double> time_;
  double volume_ = 0.0;
};

// Runs one path and adds its occupation times into a copy of grid.
OccupationGrid simulate_occupation(const ProcessParams& p, const DomainShape& domain, const Point& start,
                                   const OccupationGrid& grid, const SimConfig& cfg, RngStream& rng,
                                   ExitRecord* record = nullptr);

// Inverse CDF of Beta(a, 1-a) as cubic Hermite splines in s = U^{1/a} (lower half)
// and t = (1-U)^{1/(1-a)} (upper half); nodes from the exact inverse.
class BetaQuantileSpline {
 public:
  explicit BetaQuantileSpline(double a, int intervals = 4096);
  // q and 1 - q, each with full relative accuracy.
  void quantile(double u, double& q, double& one_minus_q) const;
  double a() const { return a_; }

 private:
  struct Half {
    double a = 0, b = 0, beta = 0, smax = 0, step = 0;
    std::vector<double> v, dv;
    void build(double a, double b, int n);
    double eval(double s) const;
  };
  double a_;
  Half lo_, hi_;
};

// Spline for Beta(alpha/2, 1-alpha/2), built once per alpha.
const BetaQuantileSpline& ball_exit_spline(double alpha);

// Exact draw (up to spline tolerance) from K_{B(center,radius)}(x, .).
Point sample_stable_ball_exit(const ProcessParams& p, const Point& center, double radius, const Point& x,
                              RngStream& rng);

// Walk on spheres for X; throws StepLimitExceeded after max_steps balls.
Point walk_on_spheres_exit(const ProcessParams& p, const DomainShape& domain, const Point& start, RngStream& rng,
                           long max_steps = 100000, long* steps_taken = nullptr);

}  // namespace tsp
