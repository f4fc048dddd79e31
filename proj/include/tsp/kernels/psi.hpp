#pragma once

#include "tsp/core.hpp"
#include "tsp/kernels/quadrature.hpp"

namespace tsp {

// Average of 1 - cos(t <theta, e>) over theta uniform on the unit sphere of R^d,
// computed as the average of 2 sin^2(t cos(phi)/2) with Gauss-Legendre panels in phi.
double sphere_one_minus_cos_average(int d, double t);

// psi(xi) = int_{|y|<1} (1 - cos(xi.y)) A |y|^{-d-alpha} dy for |xi| = xi_norm.
KernelValue char_exponent_psi(const ProcessParams& p, double xi_norm, const QuadratureConfig& quad = {});

}  // namespace tsp
