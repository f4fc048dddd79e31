#include "tsp/kernels/r0.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>
#include <vector>

#include "tsp/kernels/ball.hpp"
#include "tsp/kernels/constants.hpp"

namespace tsp {

namespace {

struct Candidate {
  double value;
  double xr, zr, phi;
};

std::pair<Candidate, int> grid_sup(const ProcessParams& p, const QuadratureConfig& quad, const R0Grid& grid);

}  // namespace

R0Result compute_r0_detailed(const ProcessParams& p, const QuadratureConfig& quad, double b_multiplier,
                             const R0Grid& grid) {
  p.validate();
  quad.validate();
  if (!(b_multiplier > 0.0)) throw Error(ErrorCode::ParamOutOfRange, "b_multiplier must be positive");
  // the grid sup does not depend on the multiplier, so only it is memoized
  using Key = std::tuple<int, double, double, double, int, int, int>;
  static std::mutex mu;
  static std::map<Key, std::pair<Candidate, int>> memo;
  const Key key{p.d, p.alpha, quad.rel_tol, grid.coarse_rel_tol, grid.radial, grid.angular, grid.refine};
  Candidate best{-1.0, 0, 0, 0};
  int pairs = 0;
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = memo.find(key);
    if (it != memo.end()) std::tie(best, pairs) = it->second;
  }
  if (best.value < 0.0) {
    std::tie(best, pairs) = grid_sup(p, quad, grid);
    std::lock_guard<std::mutex> lock(mu);
    memo.emplace(key, std::make_pair(best, pairs));
  }

  R0Result res;
  res.sup_conditioned = best.value;
  res.b_used = constant_B(p) * b_multiplier;
  res.khasminskii_radius = std::pow(2.0 * res.b_used * best.value, -1.0 / p.alpha);
  res.r0 = std::min(0.25, res.khasminskii_radius);
  res.x_norm = best.xr;
  res.z_norm = best.zr;
  res.angle = best.phi;
  res.pairs = pairs;
  return res;
}

namespace {

std::pair<Candidate, int> grid_sup(const ProcessParams& p, const QuadratureConfig& quad, const R0Grid& grid) {

  QuadratureConfig coarse = quad;
  coarse.rel_tol = std::max(quad.rel_tol, grid.coarse_rel_tol);
  std::vector<Candidate> cands;
  // x on the first axis, z in the (e1, e2) plane; the value is symmetric in (x, z)
  for (int i = 0; i < grid.radial; ++i) {
    for (int j = i; j < grid.radial; ++j) {
      for (int k = 0; k < grid.angular; ++k) {
        const double xr = (i + 0.5) / grid.radial, zr = (j + 0.5) / grid.radial;
        const double phi = std::numbers::pi * k / (grid.angular - 1);
        if (i == j && k == 0) continue;
        Point x(p.d), z(p.d);
        x[0] = xr;
        z[0] = zr * std::cos(phi);
        z[1] = zr * std::sin(phi);
        cands.push_back({conditioned_exit_time_ball(p, 1.0, x, z, coarse).value, xr, zr, phi});
      }
    }
  }
  const int pairs = static_cast<int>(cands.size());
  const int top = std::min(grid.refine, pairs);
  std::partial_sort(cands.begin(), cands.begin() + top, cands.end(),
                    [](const Candidate& a, const Candidate& b) { return a.value > b.value; });
  Candidate best{-1.0, 0, 0, 0};
  for (int c = 0; c < top; ++c) {
    Point x(p.d), z(p.d);
    x[0] = cands[c].xr;
    z[0] = cands[c].zr * std::cos(cands[c].phi);
    z[1] = cands[c].zr * std::sin(cands[c].phi);
    const double v = conditioned_exit_time_ball(p, 1.0, x, z, quad).value;
    if (v > best.value) best = {v, cands[c].xr, cands[c].zr, cands[c].phi};
  }
  return {best, pairs};
}

}  // namespace

double compute_r0(const ProcessParams& p, const QuadratureConfig& quad) { return compute_r0_detailed(p, quad).r0; }

std::pair<double, double> truncated_poisson_ball_bounds(const ProcessParams& p, const Point& center, double radius,
                                                        const Point& x, const Point& z) {
  const double cap = std::min(0.25, compute_r0(p));
  if (!(radius < cap))
    throw Error(ErrorCode::RadiusTooLarge, "radius " + std::to_string(radius) + " is not below " + std::to_string(cap));
  const double k = stable_poisson_ball(p, center, radius, x, z);
  if (dist(z, center) < 1.0 - radius) return {k, 2.0 * k};
  return {0.0, 2.0 * k};
}

}  // namespace tsp
