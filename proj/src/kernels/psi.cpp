#include "tsp/kernels/psi.hpp"

#include <cmath>
#include <numbers>

#include "tsp/kernels/constants.hpp"

namespace tsp {

using std::numbers::pi;

double sphere_one_minus_cos_average(int d, double t) {
  // the integrand is symmetric about phi = pi/2, so integrate over [0, pi/2]
  const GaussRule& g = gauss_legendre(64);
  const int panels = 1 + static_cast<int>(std::abs(t) / 20.0);
  const double width = 0.5 * pi / panels;
  double num = 0.0, den = 0.0;
  for (int k = 0; k < panels; ++k) {
    const double c = (k + 0.5) * width, h = 0.5 * width;
    for (size_t i = 0; i < g.x.size(); ++i) {
      const double phi = c + h * g.x[i];
      const double w = g.w[i] * (d == 2 ? 1.0 : std::pow(std::sin(phi), d - 2));
      const double sn = std::sin(0.5 * t * std::cos(phi));
      num += w * 2.0 * sn * sn;
      den += w;
    }
  }
  return num / den;
}

KernelValue char_exponent_psi(const ProcessParams& p, double xi_norm, const QuadratureConfig& quad) {
  p.validate();
  quad.validate();
  if (!(xi_norm >= 0.0) || !std::isfinite(xi_norm))
    throw Error(ErrorCode::ParamOutOfRange, "xi_norm must be a finite nonnegative number");
  if (xi_norm == 0.0) return {0.0, 0.0};
  const double a = p.alpha;
  const double scale = constant_A(p) * sphere_surface_area(p.d);
  // rho = u^m turns rho^{-1-alpha} (1 - avg cos) ~ rho^{1-alpha} into a bounded integrand
  const double m = 2.0 / (2.0 - a);
  auto f = [&](double u) {
    const double rho = std::pow(u, m);
    return m * sphere_one_minus_cos_average(p.d, rho * xi_norm) * std::pow(u, -m * a - 1.0);
  };
  // split at the first oscillations so the adaptive rule sees them early
  const int pieces = 1 + static_cast<int>(std::min(64.0, xi_norm / 10.0));
  KernelValue total;
  QuadratureConfig inner = quad;
  for (int k = 0; k < pieces; ++k) {
    const double lo = std::pow(static_cast<double>(k) / pieces, 1.0 / m);
    const double hi = std::pow(static_cast<double>(k + 1) / pieces, 1.0 / m);
    total = total + integrate(f, lo, hi, inner);
  }
  return {scale * total.value, scale * total.est_error};
}

}  // namespace tsp
