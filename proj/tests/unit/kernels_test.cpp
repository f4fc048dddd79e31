#include <catch2/catch_amalgamated.hpp>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <numbers>

#include "tsp/kernels/ball.hpp"
#include "tsp/kernels/constants.hpp"
#include "tsp/kernels/psi.hpp"
#include "tsp/kernels/quadrature.hpp"
#include "tsp/kernels/r0.hpp"

using namespace tsp;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
constexpr double pi = std::numbers::pi;

namespace {

const std::vector<ProcessParams> kSix = {{2, 0.5}, {2, 1.0}, {2, 1.5}, {3, 0.5}, {3, 1.0}, {3, 1.5}};

Point polar2(double r, double th) { return Point{r * std::cos(th), r * std::sin(th)}; }

}  // namespace

TEST_CASE("sphere surface areas") {
  CHECK_THAT(sphere_surface_area(2), WithinRel(2 * pi, 1e-15));
  CHECK_THAT(sphere_surface_area(3), WithinRel(4 * pi, 1e-15));
  CHECK_THAT(sphere_surface_area(4), WithinRel(2 * pi * pi, 1e-15));
  CHECK_THAT(sphere_surface_area(1), WithinRel(2.0, 1e-15));
}

TEST_CASE("constant A against symbolic and high-precision values") {
  CHECK_THAT(constant_A({2, 1.0}), WithinRel(1.0 / (2 * pi), 1e-14));
  CHECK_THAT(constant_A({3, 1.0}), WithinRel(1.0 / (pi * pi), 1e-14));
  // 30-digit mpmath evaluations of the Gamma formula
  CHECK_THAT(constant_A({2, 0.5}), WithinRel(0.0832419838754250654889402178181, 1e-12));
  CHECK_THAT(constant_A({2, 1.5}), WithinRel(0.171167129690552342925202071994, 1e-12));
  CHECK_THAT(constant_A({3, 0.5}), WithinRel(0.047620226950680727339322478701, 1e-12));
  CHECK_THAT(constant_A({3, 1.5}), WithinRel(0.119050567376701818348306196752, 1e-12));
}

TEST_CASE("constant B equals the tail mass of the Levy density") {
  CHECK_THAT(constant_B({2, 1.0}), WithinRel(1.0, 1e-14));
  CHECK_THAT(constant_B({3, 1.0}), WithinRel(4.0 / pi, 1e-14));
  boost::math::quadrature::exp_sinh<double> es;
  for (const auto& p : kSix) {
    const double A = constant_A(p), w = sphere_surface_area(p.d);
    auto f = [&](double r) { return A * w * std::pow(r, -1.0 - p.alpha); };
    const double q = es.integrate([&](double t) { return f(1.0 + t); });
    CHECK_THAT(constant_B(p), WithinRel(q, 1e-8));
  }
}

TEST_CASE("closed-form constants") {
  // d=2, alpha=1: c1 = 1/pi^2, C = 1/(2 pi^2) * Gamma(1)/Gamma(1/2)^2 ... via Gamma identities
  CHECK_THAT(poisson_ball_constant({2, 1.0}), WithinRel(1.0 / (pi * pi), 1e-14));
  CHECK_THAT(green_ball_constant({2, 1.0}), WithinRel(1.0 / (2.0 * pi * pi), 1e-14));
  CHECK_THAT(exit_time_constant({2, 1.0}), WithinRel(2.0 / pi, 1e-14));
  // alpha -> 2 limit of the exit-time constant is 1/(2d) (Brownian motion with generator Laplacian)
  CHECK_THAT(exit_time_constant({3, 1.999999}), WithinRel(1.0 / 6.0, 1e-5));
}

TEST_CASE("Gauss-Legendre rules integrate polynomials exactly") {
  for (int n : {1, 2, 5, 10, 21, 64}) {
    const auto& g = gauss_legendre(n);
    REQUIRE(g.x.size() == static_cast<size_t>(n));
    for (int k = 0; k <= 2 * n - 1; ++k) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += g.w[i] * std::pow(g.x[i], k);
      const double exact = (k % 2 == 1) ? 0.0 : 2.0 / (k + 1);
      CHECK_THAT(s, WithinAbs(exact, 1e-14));
    }
  }
}

TEST_CASE("adaptive quadrature") {
  QuadratureConfig q;
  CHECK_THAT(integrate([](double x) { return std::exp(x); }, 0.0, 1.0, q).value, WithinRel(std::exp(1.0) - 1, 1e-13));
  const KernelValue s = integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, q);
  CHECK_THAT(s.value, WithinRel(2.0, 1e-9));
  CHECK(s.est_error >= 0.0);
  CHECK_THAT(integrate_fixed([](double x) { return x * x * x; }, 0.0, 2.0, 3), WithinRel(4.0, 1e-14));
  QuadratureConfig tight{1e-14, 1e-300, 3};
  try {
    integrate([](double x) { return std::pow(x, -0.99); }, 0.0, 1.0, tight);
    FAIL("expected QuadratureDidNotConverge");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::QuadratureDidNotConverge);
  }
  CHECK_THROWS_AS(QuadratureConfig({0.0, 1e-14, 10}).validate(), Error);
}

TEST_CASE("spherical average of 1 - cos") {
  for (double t : {0.0, 0.3, 2.0, 17.0, 150.0, 900.0}) {
    CHECK_THAT(sphere_one_minus_cos_average(2, t), WithinAbs(1.0 - boost::math::cyl_bessel_j(0, t), 1e-13));
    const double sinc = t == 0.0 ? 1.0 : std::sin(t) / t;
    CHECK_THAT(sphere_one_minus_cos_average(3, t), WithinAbs(1.0 - sinc, 1e-13));
  }
}

TEST_CASE("psi vanishes at zero and matches a Bessel-form oracle in d=2") {
  for (const auto& p : kSix) CHECK(char_exponent_psi(p, 0.0).value == 0.0);
  boost::math::quadrature::tanh_sinh<double> ts;
  for (double alpha : {0.5, 1.0, 1.5}) {
    const ProcessParams p{2, alpha};
    const double Aw = constant_A(p) * 2 * pi;
    for (double xi : {0.5, 3.0, 25.0}) {
      auto f = [&](double r) {
        if (xi * r < 1e-4) return Aw * 0.25 * xi * xi * std::pow(r, 1.0 - alpha);
        return Aw * (1.0 - boost::math::cyl_bessel_j(0, xi * r)) * std::pow(r, -1.0 - alpha);
      };
      const double oracle = ts.integrate(f, 0.0, 1.0);
      CHECK_THAT(char_exponent_psi(p, xi).value, WithinRel(oracle, 1e-8));
    }
  }
}

TEST_CASE("psi asymptotics") {
  for (const auto& p : kSix) {
    const double Aw = constant_A(p) * sphere_surface_area(p.d);
    const double xi0 = 0.01;
    const double small = char_exponent_psi(p, xi0).value / (xi0 * xi0 * Aw / (2.0 * p.d * (2.0 - p.alpha)));
    CHECK(std::abs(small - 1.0) < 0.01);
    const double xi1 = 200.0;
    const double dev = char_exponent_psi(p, xi1).value - std::pow(xi1, p.alpha) + constant_B(p);
    CHECK(std::abs(dev) < 1e-2 * std::pow(xi1, p.alpha));
  }
  // d=2, alpha=1 at 0.01: xi^2/4
  CHECK_THAT(char_exponent_psi({2, 1.0}, 0.01).value, WithinRel(2.5e-5, 0.01));
}

TEST_CASE("psi is nondecreasing on a grid") {
  for (const auto& p : kSix) {
    double prev = 0.0;
    for (double xi = 0.05; xi < 400.0; xi *= 1.3) {
      const double v = char_exponent_psi(p, xi).value;
      CHECK(v >= prev);
      prev = v;
    }
  }
}

TEST_CASE("ball Poisson kernel normalization") {
  for (const auto& p : kSix) {
    const Point c = Point::zeros(p.d);
    for (double a : {0.0, 0.3, 0.8, 0.97}) {
      const Point x = Point::unit(p.d, 0, a);
      const KernelValue m = poisson_ball_shell_mass(p, c, 1.0, x, 1.0, INFINITY);
      CHECK(std::abs(m.value - 1.0) < 1e-6);
    }
  }
  // off-origin center and radius
  const ProcessParams p{2, 1.0};
  const KernelValue m = poisson_ball_shell_mass(p, Point{3.0, -1.0}, 0.2, Point{3.05, -1.1}, 0.2, INFINITY);
  CHECK(std::abs(m.value - 1.0) < 1e-6);
}

TEST_CASE("ball Poisson kernel radial survival closed form") {
  for (const auto& p : kSix) {
    const Point c = Point::zeros(p.d);
    for (double a : {0.0, 0.5}) {
      const Point x = Point::unit(p.d, 0, a);
      for (double rho : {1.05, 1.5, 3.0}) {
        const double q = poisson_ball_shell_mass(p, c, 1.0, x, rho, INFINITY).value;
        CHECK_THAT(poisson_ball_radial_survival(p, 1.0, a, rho), WithinAbs(q, 1e-8));
      }
    }
  }
}

TEST_CASE("ball Poisson kernel symmetry, scaling, preconditions") {
  const ProcessParams p{2, 1.0};
  const Point o{0.0, 0.0};
  const double v = stable_poisson_ball(p, o, 1.0, o, polar2(1.7, 0.0));
  for (double th : {0.4, 1.9, 3.0, 5.5}) CHECK_THAT(stable_poisson_ball(p, o, 1.0, o, polar2(1.7, th)), WithinRel(v, 1e-14));
  for (const auto& q : kSix) {
    Point x = Point::unit(q.d, 0, 0.07), z = Point::unit(q.d, 1, 0.31);
    const Point c = Point::zeros(q.d);
    const double r = 0.25;
    const double lhs = stable_poisson_ball(q, c, r, x, z);
    const double rhs = std::pow(r, -q.d) * stable_poisson_ball(q, c, 1.0, x * (1 / r), z * (1 / r));
    CHECK_THAT(lhs, WithinRel(rhs, 1e-12));
  }
  CHECK_THROWS_AS(stable_poisson_ball(p, o, 1.0, Point{1.0, 0.0}, Point{2.0, 0.0}), Error);
  try {
    stable_poisson_ball(p, o, 1.0, o, Point{0.5, 0.0});
    FAIL("expected PointNotExterior");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::PointNotExterior);
  }
}

TEST_CASE("Green profile agrees with the incomplete beta and with direct quadrature") {
  boost::math::quadrature::tanh_sinh<double> ts;
  for (const auto& p : kSix) {
    const GreenProfile& g = green_profile(p);
    for (double w : {1e-8, 1e-3, 0.2, 1.0, 4.0, 77.0, 1e5, 1e12}) {
      CHECK_THAT(g(w), WithinRel(green_profile_reference(p, w), 1e-13));
    }
    for (double w : {0.01, 1.0, 30.0}) {
      auto f = [&](double s) { return std::pow(s, 0.5 * p.alpha - 1.0) * std::pow(1.0 + s, -0.5 * p.d); };
      CHECK_THAT(g(w), WithinRel(ts.integrate(f, 0.0, w), 1e-10));
    }
  }
}

TEST_CASE("ball Green function symmetry, scaling, positivity") {
  for (const auto& p : kSix) {
    const Point c = Point::unit(p.d, 0, 0.4);
    for (int k = 0; k < 20; ++k) {
      Point x = c, y = c;
      x[0] += 0.3 * std::cos(0.7 * k);
      x[1] += 0.3 * std::sin(0.7 * k);
      y[0] += 0.45 * std::sin(1.3 * k + 0.1);
      y[1] -= 0.2 * std::cos(0.9 * k);
      const double gxy = stable_green_ball(p, c, 0.5, x, y).value;
      const double gyx = stable_green_ball(p, c, 0.5, y, x).value;
      CHECK(gxy > 0.0);
      CHECK(std::abs(gxy - gyx) <= 1e-12 * gxy);
      const double unit = stable_green_ball(p, Point::zeros(p.d), 1.0, (x - c) * 2.0, (y - c) * 2.0).value;
      CHECK(std::abs(gxy - std::pow(0.5, p.alpha - p.d) * unit) <= 1e-10 * gxy);
    }
  }
  const ProcessParams p{2, 1.0};
  const Point o{0.0, 0.0};
  try {
    stable_green_ball(p, o, 1.0, Point{0.2, 0.1}, Point{0.2, 0.1});
    FAIL("expected CoincidentPoints");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::CoincidentPoints);
  }
  CHECK_THROWS_AS(stable_green_ball(p, o, 1.0, Point{1.2, 0.1}, Point{0.2, 0.1}), Error);
}

TEST_CASE("expected exit time by quadrature equals the closed form") {
  for (const auto& p : kSix) {
    for (double a : {0.0, 0.35, 0.9}) {
      for (double r : {1.0, 0.2}) {
        const Point x = Point::unit(p.d, 0, a * r);
        const KernelValue e = expected_exit_time_ball(p, r, x);
        const double exact = exit_time_constant(p) * std::pow(r * r - a * a * r * r, 0.5 * p.alpha);
        CHECK_THAT(e.value, WithinRel(exact, 1e-8));
      }
    }
    // radial symmetry and boundary decay
    const double v1 = expected_exit_time_ball(p, 1.0, Point::unit(p.d, 0, 0.5)).value;
    const double v2 = expected_exit_time_ball(p, 1.0, Point::unit(p.d, 1, -0.5)).value;
    CHECK_THAT(v1, WithinRel(v2, 1e-9));
    CHECK(expected_exit_time_ball(p, 1.0, Point::unit(p.d, 0, 1.0 - 1e-6), {1e-6, 1e-14, 4000}).value < 0.1 * v1);
  }
}

TEST_CASE("conditioned exit time symmetry and scaling") {
  const QuadratureConfig q{1e-8, 1e-14, 4000};
  for (const auto& p : kSix) {
    Point x = Point::unit(p.d, 0, 0.3), z = Point::unit(p.d, 1, -0.6);
    z[0] = 0.2;
    const double a = conditioned_exit_time_ball(p, 1.0, x, z, q).value;
    const double b = conditioned_exit_time_ball(p, 1.0, z, x, q).value;
    CHECK_THAT(a, WithinRel(b, 1e-7));
    // value <= c r^alpha with c the r=1 value at the same scaled points
    for (double r : {0.5, 0.25}) {
      const double v = conditioned_exit_time_ball(p, r, x * r, z * r, q).value;
      CHECK_THAT(v, WithinRel(a * std::pow(r, p.alpha), 1e-7));
    }
  }
  try {
    conditioned_exit_time_ball({2, 1.0}, 1.0, Point{0.1, 0.1}, Point{0.1, 0.1});
    FAIL("expected CoincidentPoints");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::CoincidentPoints);
  }
}

TEST_CASE("conditioned exit time tends to the Martin-kernel limit") {
  // As z -> boundary point e1, G(y,z)/G(0,z) -> (1-|y|^2)^{alpha/2} |y-e1|^{-d}. By rotation
  // invariance of G(0,.), the limit from x=0 is int G(0,y) (1-|y|^2)^{alpha/2-1} dy.
  boost::math::quadrature::tanh_sinh<double> ts;
  const QuadratureConfig q{1e-6, 1e-14, 4000};
  for (const auto& p : kSix) {
    const double a = 0.5 * p.alpha, b = 0.5 * (p.d - p.alpha);
    const double C = green_ball_constant(p), om = sphere_surface_area(p.d);
    auto f = [&](double r, double rc) {
      const double s = rc > 0 ? rc * (2.0 - rc) : 1.0 - r * r;
      return om * C * std::pow(r, p.alpha - 1.0) * boost::math::beta(a, b, s) * std::pow(s, a - 1.0);
    };
    const double limit = ts.integrate(f, 0.0, 1.0);
    double prev = INFINITY;
    for (double delta : {1e-2, 1e-3, 1e-4}) {
      const double v = conditioned_exit_time_ball(p, 1.0, Point::zeros(p.d), Point::unit(p.d, 0, 1.0 - delta), q).value;
      const double err = std::abs(v - limit);
      CHECK(err < prev);
      prev = err;
    }
    CHECK(prev < 0.01 * limit);
  }
}

TEST_CASE("r0 in d=2: range, frozen values, bisection oracle") {
  for (double alpha : {0.5, 1.0, 1.5}) {
    const R0Result r = compute_r0_detailed({2, alpha});
    CHECK(r.r0 > 0.0);
    CHECK(r.r0 <= 0.25);
    CHECK(r.pairs == 21 * 22 / 2 * 16 - 21);
  }
  const R0Result r = compute_r0_detailed({2, 1.0});
  CHECK(r.r0 == 0.25);
  // frozen from the grid scan (argmax at |x| = |z| = 31/42, antipodal)
  CHECK_THAT(r.khasminskii_radius, WithinRel(0.485312208528, 1e-8));
  CHECK_THAT(r.sup_conditioned, WithinRel(1.030264623915, 1e-8));
  CHECK_THAT(r.x_norm, WithinRel(15.5 / 21, 1e-14));
  CHECK_THAT(r.angle, WithinRel(pi, 1e-14));
  CHECK_THAT(compute_r0_detailed({2, 0.5}).r0, WithinRel(0.097154775938, 1e-8));
  CHECK_THAT(compute_r0_detailed({2, 1.5}).khasminskii_radius, WithinRel(1.054353091191, 1e-8));

  // bisection on 2 B E^z_x tau_{B_rad} = 1 at the argmax configuration, evaluated at radius rad
  const ProcessParams p{2, 1.0};
  const double B = constant_B(p);
  auto gauge = [&](double rad) {
    const Point x = polar2(r.x_norm * rad, 0.0), z = polar2(r.z_norm * rad, r.angle);
    return 2.0 * B * conditioned_exit_time_ball(p, rad, x, z).value - 1.0;
  };
  double lo = 0.01, hi = 2.0;
  for (int i = 0; i < 50; ++i) {
    const double mid = 0.5 * (lo + hi);
    (gauge(mid) < 0.0 ? lo : hi) = mid;
  }
  CHECK_THAT(0.5 * (lo + hi), WithinRel(r.khasminskii_radius, 1e-8));
}

// About 17 minutes; run through its own ctest entry.
TEST_CASE("r0 in d=3: frozen values", "[.][r0_d3]") {
  CHECK_THAT(compute_r0_detailed({3, 0.5}).r0, WithinRel(0.088259800624, 1e-8));
  const R0Result one = compute_r0_detailed({3, 1.0});
  CHECK(one.r0 == 0.25);
  CHECK_THAT(one.khasminskii_radius, WithinRel(0.452725448613, 1e-8));
  CHECK_THAT(one.sup_conditioned, WithinRel(0.867411105123, 1e-8));
  const R0Result three_halves = compute_r0_detailed({3, 1.5});
  CHECK_THAT(three_halves.khasminskii_radius, WithinRel(0.998907761537, 1e-8));
  CHECK_THAT(three_halves.sup_conditioned, WithinRel(0.502148128490, 1e-8));
}

TEST_CASE("r0 decreases when B is doubled") {
  for (double alpha : {0.5, 1.0, 1.5}) {
    const R0Result one = compute_r0_detailed({2, alpha});
    const R0Result two = compute_r0_detailed({2, alpha}, {}, 2.0);
    CHECK(two.khasminskii_radius < one.khasminskii_radius);
    CHECK_THAT(two.khasminskii_radius, WithinRel(one.khasminskii_radius * std::pow(2.0, -1.0 / alpha), 1e-12));
    CHECK(two.r0 <= one.r0);
  }
  CHECK(compute_r0_detailed({2, 1.0}, {}, 2.0).r0 < compute_r0_detailed({2, 1.0}).r0);
}

TEST_CASE("truncated Poisson sandwich") {
  const ProcessParams p{2, 1.0};
  const Point c{0.0, 0.0}, x{0.03, -0.02};
  const double r = 0.1;
  for (double rho : {0.15, 0.5, 0.89, 0.95, 1.3}) {
    const Point z = polar2(rho, 1.1);
    const auto [lo, up] = truncated_poisson_ball_bounds(p, c, r, x, z);
    const double k = stable_poisson_ball(p, c, r, x, z);
    CHECK(lo <= up);
    CHECK_THAT(up, WithinRel(2.0 * k, 1e-15));
    if (rho < 1.0 - r) CHECK(lo == k);
    else CHECK(lo == 0.0);
  }
  try {
    truncated_poisson_ball_bounds(p, c, 0.25, x, polar2(0.5, 0.0));
    FAIL("expected RadiusTooLarge");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::RadiusTooLarge);
  }
  // alpha = 0.5 has r0 < 1/4
  CHECK_THROWS_AS(truncated_poisson_ball_bounds({2, 0.5}, c, 0.12, x, polar2(0.5, 0.0)), Error);
}
