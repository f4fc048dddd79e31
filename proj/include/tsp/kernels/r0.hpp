#pragma once

#include <utility>

#include "tsp/core.hpp"
#include "tsp/kernels/quadrature.hpp"

namespace tsp {

struct R0Result {
  double r0 = 0.0;                  // min(1/4, khasminskii_radius)
  double khasminskii_radius = 0.0;  // (2 B S)^{-1/alpha}, uncapped
  double sup_conditioned = 0.0;     // S over the grid, unit ball
  double b_used = 0.0;              // B(d,alpha) times the multiplier
  double x_norm = 0.0, z_norm = 0.0, angle = 0.0;  // grid argmax
  int pairs = 0;
};

struct R0Grid {
  int radial = 21;   // nodes (i + 1/2)/radial
  int angular = 16;  // angles k pi/(angular - 1)
  int refine = 8;    // top coarse pairs re-evaluated at full tolerance
  double coarse_rel_tol = 1e-3;
};

// Largest radius at which B E^z_x tau_{B_r} <= 1/2 on the grid, capped at 1/4.
// b_multiplier scales B(d,alpha) (sensitivity hook). Results are memoized.
R0Result compute_r0_detailed(const ProcessParams& p, const QuadratureConfig& quad = {}, double b_multiplier = 1.0,
                             const R0Grid& grid = {});
double compute_r0(const ProcessParams& p, const QuadratureConfig& quad = {});

// (K_B(x,z), 2 K_B(x,z)) when |z - center| < 1 - radius, else (0, 2 K_B(x,z)).
std::pair<double, double> truncated_poisson_ball_bounds(const ProcessParams& p, const Point& center, double radius,
                                                        const Point& x, const Point& z);

}  // namespace tsp
