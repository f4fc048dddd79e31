#include "tsp/kernels/constants.hpp"

#include <cmath>
#include <numbers>

namespace tsp {

using std::numbers::pi;

double sphere_surface_area(int d) {
  if (d < 1) throw Error(ErrorCode::InvalidParams, "sphere_surface_area needs d >= 1");
  return 2.0 * std::pow(pi, 0.5 * d) / std::tgamma(0.5 * d);
}

double constant_A(const ProcessParams& p) {
  p.validate();
  const double a = p.alpha;
  return a * std::pow(2.0, a - 1.0) * std::pow(pi, -0.5 * p.d) * std::tgamma(0.5 * (p.d + a)) /
         std::tgamma(1.0 - 0.5 * a);
}

double constant_B(const ProcessParams& p) { return constant_A(p) * sphere_surface_area(p.d) / p.alpha; }

double poisson_ball_constant(const ProcessParams& p) {
  p.validate();
  return std::tgamma(0.5 * p.d) * std::sin(0.5 * pi * p.alpha) * std::pow(pi, -0.5 * p.d - 1.0);
}

double green_ball_constant(const ProcessParams& p) {
  p.validate();
  const double g = std::tgamma(0.5 * p.alpha);
  return std::tgamma(0.5 * p.d) / (std::pow(2.0, p.alpha) * std::pow(pi, 0.5 * p.d) * g * g);
}

double exit_time_constant(const ProcessParams& p) {
  p.validate();
  return std::tgamma(0.5 * p.d) /
         (std::pow(2.0, p.alpha) * std::tgamma(1.0 + 0.5 * p.alpha) * std::tgamma(0.5 * (p.d + p.alpha)));
}

}  // namespace tsp
