#include "tsp/kernels/ball.hpp"

#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

#include "tsp/kernels/constants.hpp"

namespace tsp {

using std::numbers::pi;

namespace {

template <size_t N>
void chebyshev_fit(std::array<double, N>& c, auto&& f) {
  std::array<double, N> fx{};
  for (size_t j = 0; j < N; ++j) fx[j] = f(std::cos(pi * (j + 0.5) / N));
  for (size_t k = 0; k < N; ++k) {
    double s = 0.0;
    for (size_t j = 0; j < N; ++j) s += fx[j] * std::cos(pi * k * (j + 0.5) / N);
    c[k] = 2.0 * s / N;
  }
  c[0] *= 0.5;
}

template <size_t N>
double chebyshev_eval(const std::array<double, N>& c, double x) {
  double b1 = 0.0, b2 = 0.0;
  for (size_t k = N - 1; k >= 1; --k) {
    double b0 = 2.0 * x * b1 - b2 + c[k];
    b2 = b1;
    b1 = b0;
  }
  return x * b1 - b2 + c[0];
}

double axis_weight(int k, double angle) { return k == 0 ? 1.0 : std::pow(std::sin(angle), k); }

// s-integral along a ray [0, smax] with an s^{alpha-1} singularity at 0 and a
// power-law boundary factor at smax; both ends are mapped to smooth integrands.
template <class F>
KernelValue ray_integral(F&& f, double smax, double alpha, const QuadratureConfig& cfg) {
  const double smid = 0.5 * smax;
  const double k = 3.0 / alpha;
  auto lower = [&](double v) {
    if (v <= 0.0) return 0.0;
    const double s = smid * std::pow(v, k);
    return f(s) * smid * k * std::pow(v, k - 1.0);
  };
  const double m = std::max(2.0, 2.0 / alpha);
  auto upper = [&](double v) {
    if (v <= 0.0) return 0.0;
    const double s = smax - (smax - smid) * std::pow(v, m);
    return f(s) * (smax - smid) * m * std::pow(v, m - 1.0);
  };
  return integrate(lower, 0.0, 1.0, cfg) + integrate(upper, 0.0, 1.0, cfg);
}

QuadratureConfig tighter(const QuadratureConfig& q) {
  QuadratureConfig t = q;
  t.rel_tol = q.rel_tol * 0.25;
  t.abs_tol = q.abs_tol * 0.25;
  return t;
}

// Radial pieces in rho over (r, infinity): [r, 2r] with (rho - r)^{-alpha/2}, then a
// rho^{-1-alpha} tail. Calls g(rho, w) with w = jacobian * (rho - r)^{-alpha/2}; on the
// first piece the product is formed analytically so rho -> r stays finite.
template <class G>
KernelValue exterior_radial(G&& g, double r, double alpha, double lo, double hi, const QuadratureConfig& cfg) {
  KernelValue total;
  const double m = 2.0 / (2.0 - alpha);
  const double a1 = std::max(lo, r), b1 = std::min(hi, 2.0 * r);
  if (a1 < b1) {
    // rho = r + r v^m
    const double va = std::pow((a1 - r) / r, 1.0 / m), vb = std::pow((b1 - r) / r, 1.0 / m);
    auto f = [&](double v) {
      const double rho = r + r * std::pow(v, m);
      return g(rho, std::pow(r, 1.0 - 0.5 * alpha) * m);
    };
    total = total + integrate(f, va, vb, cfg);
  }
  const double a2 = std::max(lo, 2.0 * r), b2 = hi;
  if (a2 < b2) {
    // rho = 2r t^{-1/alpha}
    const double ta = std::pow(2.0 * r / a2, alpha);
    const double tb = std::isinf(b2) ? 0.0 : std::pow(2.0 * r / b2, alpha);
    auto f = [&](double t) {
      if (t <= 0.0) return KernelValue{};
      const double rho = 2.0 * r * std::pow(t, -1.0 / alpha);
      return g(rho, rho / (alpha * t) * std::pow(rho - r, -0.5 * alpha));
    };
    total = total + integrate(f, tb, ta, cfg);
  }
  return total;
}

}  // namespace

GreenProfile::GreenProfile(const ProcessParams& p) {
  p.validate();
  a_ = 0.5 * p.alpha;
  b_ = 0.5 * (p.d - p.alpha);
  beta_ = boost::math::beta(a_, b_);
  const double a = a_, b = b_;
  // I_t(a,b) = t^a g(t) and 1 - I_t(a,b) = (1-t)^b h(1-t), g and h analytic on [0, 1/2]
  chebyshev_fit(lower_, [&](double x) {
    double t = 0.25 * (1.0 + x);
    return boost::math::ibeta(a, b, t) / std::pow(t, a);
  });
  chebyshev_fit(upper_, [&](double x) {
    double u = 0.25 * (1.0 + x);
    return boost::math::ibeta(b, a, u) / std::pow(u, b);
  });
}

double GreenProfile::operator()(double w) const {
  if (w <= 0.0) return 0.0;
  if (w <= 1.0) {
    const double t = w / (1.0 + w);
    return beta_ * std::pow(t, a_) * chebyshev_eval(lower_, 4.0 * t - 1.0);
  }
  if (std::isinf(w)) return beta_;
  const double u = 1.0 / (1.0 + w);
  return beta_ * (1.0 - std::pow(u, b_) * chebyshev_eval(upper_, 4.0 * u - 1.0));
}

const GreenProfile& green_profile(const ProcessParams& p) {
  static std::mutex mu;
  static std::map<std::pair<int, double>, std::unique_ptr<GreenProfile>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[{p.d, p.alpha}];
  if (!slot) slot = std::make_unique<GreenProfile>(p);
  return *slot;
}

double green_profile_reference(const ProcessParams& p, double w) {
  const double a = 0.5 * p.alpha, b = 0.5 * (p.d - p.alpha);
  const double B = boost::math::beta(a, b);
  if (w <= 1.0) return B * boost::math::ibeta(a, b, w / (1.0 + w));
  return B * boost::math::ibetac(b, a, 1.0 / (1.0 + w));
}

double stable_poisson_ball(const ProcessParams& p, const Point& center, double radius, const Point& x,
                           const Point& z) {
  p.validate();
  require_same_dim(center, p.d, "center");
  require_same_dim(x, p.d, "x");
  require_same_dim(z, p.d, "z");
  const double r2 = radius * radius;
  const double ax = dist2(x, center), az = dist2(z, center);
  if (!(ax < r2)) throw Error(ErrorCode::PointNotInterior, "x must lie inside the ball");
  if (!(az > r2)) throw Error(ErrorCode::PointNotExterior, "z must lie outside the closed ball");
  const double c1 = poisson_ball_constant(p);
  return c1 * std::pow((r2 - ax) / (az - r2), 0.5 * p.alpha) * std::pow(dist2(x, z), -0.5 * p.d);
}

namespace {

// Unit-ball Green function from |x|^2, |y|^2, |x-y|^2.
inline double green_unit(const ProcessParams& p, const GreenProfile& prof, double C, double ax, double ay,
                         double dxy2) {
  const double w = (1.0 - ax) * (1.0 - ay) / dxy2;
  return C * std::pow(dxy2, 0.5 * (p.alpha - p.d)) * prof(w);
}

}  // namespace

KernelValue stable_green_ball(const ProcessParams& p, const Point& center, double radius, const Point& x,
                              const Point& y) {
  p.validate();
  require_same_dim(center, p.d, "center");
  require_same_dim(x, p.d, "x");
  require_same_dim(y, p.d, "y");
  const double r2 = radius * radius;
  const Point xs = x - center, ys = y - center;
  const double ax = xs.norm2(), ay = ys.norm2();
  if (!(ax < r2) || !(ay < r2)) throw Error(ErrorCode::PointNotInterior, "points must lie inside the ball");
  const double dxy2 = dist2(xs, ys);
  if (dxy2 == 0.0) throw Error(ErrorCode::CoincidentPoints, "x and y coincide");
  const double w = (r2 - ax) * (r2 - ay) / (r2 * dxy2);
  const double g = green_ball_constant(p) * std::pow(dxy2, 0.5 * (p.alpha - p.d)) * green_profile(p)(w);
  return {g, 1e-13 * g};
}

KernelValue expected_exit_time_ball(const ProcessParams& p, double radius, const Point& x,
                                    const QuadratureConfig& quad) {
  p.validate();
  quad.validate();
  require_same_dim(x, p.d, "x");
  if (!(radius > 0.0)) throw Error(ErrorCode::ParamOutOfRange, "radius must be positive");
  const double r = radius;
  const double a = x.norm();
  if (!(a < r)) throw Error(ErrorCode::PointNotInterior, "x must lie inside the ball");
  // unit ball, then scale by r^alpha
  const double au = a / r;
  const GreenProfile& prof = green_profile(p);
  const double C = green_ball_constant(p);
  const double wphi = sphere_surface_area(p.d - 1);
  const QuadratureConfig inner = tighter(quad);
  auto outer = [&](double phi) {
    const double c = std::cos(phi);
    const double ax = au * au;
    const double smax = -au * c + std::sqrt(au * au * c * c + 1.0 - ax);
    auto f = [&](double s) {
      const double ay = ax + s * s + 2.0 * au * s * c;
      if (ay >= 1.0) return 0.0;
      return green_unit(p, prof, C, ax, ay, s * s) * std::pow(s, p.d - 1);
    };
    KernelValue v = ray_integral(f, smax, p.alpha, inner);
    const double wgt = wphi * axis_weight(p.d - 2, phi);
    return KernelValue{v.value * wgt, v.est_error * wgt};
  };
  KernelValue v = integrate(outer, 0.0, pi, quad);
  const double s = std::pow(r, p.alpha);
  return {v.value * s, v.est_error * s};
}

KernelValue conditioned_exit_time_ball(const ProcessParams& p, double radius, const Point& x, const Point& z,
                                       const QuadratureConfig& quad) {
  p.validate();
  quad.validate();
  require_same_dim(x, p.d, "x");
  require_same_dim(z, p.d, "z");
  if (!(radius > 0.0)) throw Error(ErrorCode::ParamOutOfRange, "radius must be positive");
  const Point xu = x * (1.0 / radius), zu = z * (1.0 / radius);
  if (!(xu.norm2() < 1.0) || !(zu.norm2() < 1.0))
    throw Error(ErrorCode::PointNotInterior, "x and z must lie inside the ball");
  const double L2 = dist2(xu, zu);
  if (L2 == 0.0) throw Error(ErrorCode::CoincidentPoints, "x and z coincide");
  const double L = std::sqrt(L2);
  const GreenProfile& prof = green_profile(p);
  const double C = green_ball_constant(p);
  const int d = p.d;
  const double gxz = green_unit(p, prof, C, xu.norm2(), zu.norm2(), L2);
  const QuadratureConfig mid = tighter(quad), inner = tighter(mid);

  // polar integral around `o` of f * w_o, where w_o = D_q^d / (D_o^d + D_q^d) and q is the
  // other singular point; e1 points from o to q, e2 completes the plane through the origin
  auto part = [&](const Point& o, const Point& q) {
    const Point e1 = (q - o) * (1.0 / L);
    Point e2 = o - e1 * o.dot(e1);
    double n2 = e2.norm();
    if (n2 < 1e-14) {
      // o, q and the origin are collinear; any unit vector orthogonal to e1 will do
      e2 = Point::zeros(d);
      int axis = std::abs(e1[0]) < 0.9 ? 0 : 1;
      e2[axis] = 1.0;
      e2 -= e1 * e2.dot(e1);
      n2 = e2.norm();
    }
    e2 *= 1.0 / n2;
    const double o1 = o.dot(e1), o2 = o.dot(e2), ao = o.norm2();
    auto ray = [&](double ct, double st, double cps) {
      const double oe = ct * o1 + st * cps * o2;
      const double smax = -oe + std::sqrt(oe * oe + 1.0 - ao);
      auto f = [&](double s) {
        const double ay = ao + s * s + 2.0 * s * oe;
        if (ay >= 1.0) return 0.0;
        const double Do = s * s;
        const double Dq = std::max(s * s - 2.0 * s * L * ct + L2, 0.0);
        if (Dq == 0.0) return 0.0;
        const double wo = 1.0 / (1.0 + std::pow(Do / Dq, d));
        const double g1 = green_unit(p, prof, C, ao, ay, Do);
        const double g2 = green_unit(p, prof, C, ay, q.norm2(), Dq);
        return g1 * g2 / gxz * wo * std::pow(s, d - 1);
      };
      return ray_integral(f, smax, p.alpha, inner);
    };
    if (d == 2) {
      auto outer = [&](double th) {
        const double ct = std::cos(th), st = std::sin(th);
        return ray(ct, st, 1.0) + ray(ct, st, -1.0);
      };
      return integrate(outer, 0.0, pi, mid);
    }
    const double wpsi = sphere_surface_area(d - 2);
    auto outer = [&](double th) {
      const double ct = std::cos(th), st = std::sin(th);
      auto psi = [&](double ps) {
        KernelValue v = ray(ct, st, std::cos(ps));
        const double w = wpsi * axis_weight(d - 3, ps);
        return KernelValue{v.value * w, v.est_error * w};
      };
      KernelValue v = integrate(psi, 0.0, pi, mid);
      const double w = axis_weight(d - 2, th);
      return KernelValue{v.value * w, v.est_error * w};
    };
    return integrate(outer, 0.0, pi, mid);
  };
  KernelValue v = part(xu, zu) + part(zu, xu);
  const double s = std::pow(radius, p.alpha);
  return {v.value * s, v.est_error * s};
}

double poisson_ball_radial_survival(const ProcessParams& p, double radius, double a, double rho) {
  p.validate();
  if (!(a >= 0.0 && a < radius)) throw Error(ErrorCode::PointNotInterior, "start must lie inside the ball");
  if (rho <= radius) return 1.0;
  if (std::isinf(rho)) return 0.0;
  const double W = (rho * rho - radius * radius) / (radius * radius - a * a);
  return boost::math::ibeta(0.5 * p.alpha, 1.0 - 0.5 * p.alpha, 1.0 / (1.0 + W));
}

KernelValue poisson_ball_shell_mass(const ProcessParams& p, const Point& center, double radius, const Point& x,
                                    double rho_lo, double rho_hi, const QuadratureConfig& quad) {
  p.validate();
  require_same_dim(x, p.d, "x");
  require_same_dim(center, p.d, "center");
  const double a = dist(x, center), r = radius;
  if (!(a < r)) throw Error(ErrorCode::PointNotInterior, "x must lie inside the ball");
  if (!(rho_hi > rho_lo)) return {};
  const double c1 = poisson_ball_constant(p);
  const double wphi = sphere_surface_area(p.d - 1);
  const double pref = c1 * std::pow(r * r - a * a, 0.5 * p.alpha);
  const QuadratureConfig inner = tighter(quad);
  auto g = [&](double rho, double jac) {
    const double radial = pref * std::pow(rho + r, -0.5 * p.alpha) * std::pow(rho, p.d - 1) * jac;
    if (a == 0.0) {
      const double v = radial * sphere_surface_area(p.d) * std::pow(rho, -p.d);
      return KernelValue{v, 0.0};
    }
    auto ang = [&](double phi) {
      const double d2 = a * a + rho * rho - 2.0 * a * rho * std::cos(phi);
      return wphi * axis_weight(p.d - 2, phi) * std::pow(d2, -0.5 * p.d);
    };
    KernelValue v = integrate(ang, 0.0, pi, inner);
    return KernelValue{radial * v.value, radial * v.est_error};
  };
  return exterior_radial(g, r, p.alpha, rho_lo, rho_hi, quad);
}

KernelValue poisson_ball_cell_mass(const ProcessParams& p, const Point& center, double radius, const Point& x,
                                   double rho_lo, double rho_hi, double th_lo, double th_hi,
                                   const QuadratureConfig& quad) {
  p.validate();
  if (p.d != 2) throw Error(ErrorCode::DimensionMismatch, "polar cells are two-dimensional");
  require_same_dim(x, 2, "x");
  require_same_dim(center, 2, "center");
  const Point xs = x - center;
  const double a2 = xs.norm2(), r = radius;
  if (!(a2 < r * r)) throw Error(ErrorCode::PointNotInterior, "x must lie inside the ball");
  const double c1 = poisson_ball_constant(p);
  const double pref = c1 * std::pow(r * r - a2, 0.5 * p.alpha);
  const QuadratureConfig inner = tighter(quad);
  auto g = [&](double rho, double jac) {
    const double radial = pref * std::pow(rho + r, -0.5 * p.alpha) * rho * jac;
    auto ang = [&](double th) {
      const double zx = rho * std::cos(th) - xs[0], zy = rho * std::sin(th) - xs[1];
      return 1.0 / (zx * zx + zy * zy);
    };
    KernelValue v = integrate(ang, th_lo, th_hi, inner);
    return KernelValue{radial * v.value, radial * v.est_error};
  };
  return exterior_radial(g, r, p.alpha, rho_lo, rho_hi, quad);
}

KernelValue green_ball_box_integral(const ProcessParams& p, const Point& center, double radius, const Point& x,
                                    const Point& lo, const Point& hi, const QuadratureConfig& quad) {
  p.validate();
  if (p.d != 2) throw Error(ErrorCode::DimensionMismatch, "box integrals are two-dimensional");
  const QuadratureConfig inner = tighter(quad);
  auto outer = [&](double y0) {
    auto f = [&](double y1) { return stable_green_ball(p, center, radius, x, Point{y0, y1}).value; };
    return integrate(f, lo[1], hi[1], inner);
  };
  return integrate(outer, lo[0], hi[0], quad);
}

}  // namespace tsp
