#pragma once

#include <array>

#include "tsp/core.hpp"
#include "tsp/kernels/quadrature.hpp"

namespace tsp {

// Phi(w) = int_0^w s^{alpha/2-1} (1+s)^{-d/2} ds, the radial profile of the ball
// Green function. Chebyshev fits of the regularized incomplete beta, built once per
// (d, alpha); relative accuracy ~1e-14.
class GreenProfile {
 public:
  explicit GreenProfile(const ProcessParams& p);
  double operator()(double w) const;
  double limit() const { return beta_; }  // Phi(infinity)

 private:
  static constexpr int kTerms = 28;
  double a_, b_, beta_;
  std::array<double, kTerms> lower_{}, upper_{};
};

const GreenProfile& green_profile(const ProcessParams& p);

// Phi(w) through Boost's incomplete beta; reference for GreenProfile.
double green_profile_reference(const ProcessParams& p, double w);

// K_{B(center,radius)}(x, z) for the untruncated stable process.
double stable_poisson_ball(const ProcessParams& p, const Point& center, double radius, const Point& x,
                           const Point& z);

// G_{B(center,radius)}(x, y); est_error reflects the profile accuracy.
KernelValue stable_green_ball(const ProcessParams& p, const Point& center, double radius, const Point& x,
                              const Point& y);

// E_x tau_{B(0,radius)} by quadrature of the Green function, polar around x.
KernelValue expected_exit_time_ball(const ProcessParams& p, double radius, const Point& x,
                                    const QuadratureConfig& quad = {});

// E^z_x tau_{B(0,radius)} = int G(x,y) G(y,z) / G(x,z) dy.
KernelValue conditioned_exit_time_ball(const ProcessParams& p, double radius, const Point& x, const Point& z,
                                       const QuadratureConfig& quad = {});

// P_x(|X_tau - center| > rho) for the ball exit law, |x - center| = a. Closed form
// I_{1/(1+W)}(alpha/2, 1-alpha/2) with W = (rho^2 - r^2)/(r^2 - a^2).
double poisson_ball_radial_survival(const ProcessParams& p, double radius, double a, double rho);

// Mass of K_B(x, .) on the shell rho_lo <= |z - center| < rho_hi by quadrature
// (rho_hi may be +infinity).
KernelValue poisson_ball_shell_mass(const ProcessParams& p, const Point& center, double radius, const Point& x,
                                    double rho_lo, double rho_hi, const QuadratureConfig& quad = {});

// d = 2: mass of K_B(x, .) on the polar cell {rho_lo <= |z-c| < rho_hi, th_lo <= arg(z-c) < th_hi}.
KernelValue poisson_ball_cell_mass(const ProcessParams& p, const Point& center, double radius, const Point& x,
                                   double rho_lo, double rho_hi, double th_lo, double th_hi,
                                   const QuadratureConfig& quad = {});

// d = 2: integral of G_B(x, .) over the axis box [lo, hi] (box inside the ball, away from x).
KernelValue green_ball_box_integral(const ProcessParams& p, const Point& center, double radius, const Point& x,
                                    const Point& lo, const Point& hi, const QuadratureConfig& quad = {});

}  // namespace tsp
