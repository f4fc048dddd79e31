#pragma once

#include "tsp/core.hpp"

namespace tsp {

// Surface area of the unit sphere in R^d: 2 pi^{d/2} / Gamma(d/2).
double sphere_surface_area(int d);

// A(d,-alpha) = alpha 2^{alpha-1} pi^{-d/2} Gamma((d+alpha)/2) / Gamma(1-alpha/2).
double constant_A(const ProcessParams& p);

// B(d,alpha) = A * omega_{d-1} / alpha, the mass of the Levy density outside the unit ball.
double constant_B(const ProcessParams& p);

// c1 = Gamma(d/2) sin(pi alpha/2) pi^{-d/2-1}, the ball Poisson kernel constant.
double poisson_ball_constant(const ProcessParams& p);

// C = Gamma(d/2) / (2^alpha pi^{d/2} Gamma(alpha/2)^2), the ball Green function constant.
double green_ball_constant(const ProcessParams& p);

// E_x tau_{B(0,r)} = exit_time_constant * (r^2 - |x|^2)^{alpha/2}.
double exit_time_constant(const ProcessParams& p);

}  // namespace tsp
