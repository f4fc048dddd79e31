#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <type_traits>
#include <vector>

#include "tsp/core.hpp"

namespace tsp {

struct QuadratureConfig {
  double rel_tol = 1e-10;
  double abs_tol = 1e-14;
  int max_subdivisions = 4000;
  void validate() const;
};

struct KernelValue {
  double value = 0.0;
  double est_error = 0.0;
};

inline KernelValue operator+(KernelValue a, KernelValue b) {
  return {a.value + b.value, a.est_error + b.est_error};
}

struct GaussRule {
  std::vector<double> x, w;  // on [-1, 1]
};

// n-point Gauss-Legendre rule, cached per n.
const GaussRule& gauss_legendre(int n);

namespace quad_detail {

// 21-point Kronrod extension of the 10-point Gauss rule (QUADPACK qk21).
inline constexpr double kXgk[11] = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};
inline constexpr double kWgk[11] = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077208977880288, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
inline constexpr double kWg[5] = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct Panel {
  double a, b, value, error;
};

template <class R>
inline KernelValue as_kv(const R& r) {
  if constexpr (std::is_same_v<std::decay_t<R>, KernelValue>)
    return r;
  else
    return {static_cast<double>(r), 0.0};
}

template <class F>
Panel gk21(F& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  KernelValue fc = as_kv(f(c));
  double resk = fc.value * kWgk[10];
  double inner = fc.est_error * kWgk[10];
  double resg = 0.0;
  double resabs = std::abs(resk);
  double fv1[10], fv2[10];
  for (int j = 0; j < 10; ++j) {
    double dx = h * kXgk[j];
    KernelValue f1 = as_kv(f(c - dx)), f2 = as_kv(f(c + dx));
    fv1[j] = f1.value;
    fv2[j] = f2.value;
    resk += kWgk[j] * (f1.value + f2.value);
    inner += kWgk[j] * (f1.est_error + f2.est_error);
    resabs += kWgk[j] * (std::abs(f1.value) + std::abs(f2.value));
    if (j % 2 == 1) resg += kWg[j / 2] * (f1.value + f2.value);
  }
  double reskh = 0.5 * resk;
  double resasc = kWgk[10] * std::abs(fc.value - reskh);
  for (int j = 0; j < 10; ++j) resasc += kWgk[j] * (std::abs(fv1[j] - reskh) + std::abs(fv2[j] - reskh));
  const double ah = std::abs(h);
  double err = std::abs((resk - resg) * h);
  resasc *= ah;
  resabs *= ah;
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  const double eps = std::numeric_limits<double>::epsilon();
  if (resabs > std::numeric_limits<double>::min() / (50 * eps)) err = std::max(50 * eps * resabs, err);
  if (!std::isfinite(resk)) throw Error(ErrorCode::QuadratureDidNotConverge, "non-finite integrand");
  return {a, b, resk * h, err + std::abs(inner * h)};
}

}  // namespace quad_detail

// Globally adaptive Gauss-Kronrod. The integrand may return double or
// KernelValue; in the latter case inner errors are integrated into est_error.
template <class F>
KernelValue integrate(F&& f, double a, double b, const QuadratureConfig& cfg) {
  using quad_detail::Panel;
  if (a == b) return {0.0, 0.0};
  std::vector<Panel> panels;
  panels.reserve(64);
  panels.push_back(quad_detail::gk21(f, a, b));
  int splits = 0;
  while (true) {
    double total = 0.0, err = 0.0;
    size_t worst = 0;
    double worst_err = -1.0;
    for (size_t i = 0; i < panels.size(); ++i) {
      total += panels[i].value;
      err += panels[i].error;
      const Panel& p = panels[i];
      bool splittable = std::abs(p.b - p.a) > 1e-13 * std::max(std::abs(p.a), std::abs(p.b)) + 1e-300;
      if (splittable && p.error > worst_err) {
        worst_err = p.error;
        worst = i;
      }
    }
    double tol = std::max(cfg.abs_tol, cfg.rel_tol * std::abs(total));
    if (err <= tol) return {total, err};
    if (splits >= cfg.max_subdivisions || worst_err < 0.0)
      throw Error(ErrorCode::QuadratureDidNotConverge,
                  "estimated error " + std::to_string(err) + " above tolerance " + std::to_string(tol));
    Panel p = panels[worst];
    double m = 0.5 * (p.a + p.b);
    panels[worst] = quad_detail::gk21(f, p.a, m);
    panels.push_back(quad_detail::gk21(f, m, p.b));
    ++splits;
  }
}

// Fixed Gauss-Legendre rule on [a, b].
template <class F>
double integrate_fixed(F&& f, double a, double b, int n) {
  const GaussRule& g = gauss_legendre(n);
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double s = 0.0;
  for (size_t i = 0; i < g.x.size(); ++i) s += g.w[i] * f(c + h * g.x[i]);
  return s * h;
}

}  // namespace tsp
