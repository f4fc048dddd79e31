#include "tsp/sim/simulator.hpp"

#include <boost/math/special_functions/beta.hpp>
#include <map>
#include <memory>
#include <mutex>

#include "tsp/kernels/constants.hpp"

namespace tsp {

void SimConfig::validate() const {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw Error(ErrorCode::ParamOutOfRange, "epsilon must lie in (0,1)");
  if (!(time_step > 0.0)) throw Error(ErrorCode::ParamOutOfRange, "time_step must be positive");
  if (!(max_time > 0.0)) throw Error(ErrorCode::ParamOutOfRange, "max_time must be positive");
  if (!(epsilon_boundary_factor >= 0.0)) throw Error(ErrorCode::ParamOutOfRange, "epsilon_boundary_factor < 0");
  if (!(min_epsilon > 0.0 && min_epsilon <= epsilon))
    throw Error(ErrorCode::ParamOutOfRange, "min_epsilon must lie in (0, epsilon]");
  if (!(min_step_fraction > 0.0 && min_step_fraction <= 1.0))
    throw Error(ErrorCode::ParamOutOfRange, "min_step_fraction must lie in (0,1]");
}

namespace {
void check_epsilon(double e) {
  if (!(e > 0.0 && e < 1.0)) throw Error(ErrorCode::ParamOutOfRange, "epsilon must lie in (0,1)");
}
}  // namespace

double jump_rate(const ProcessParams& p, double epsilon) {
  p.validate();
  check_epsilon(epsilon);
  const double aw = constant_A(p) * sphere_surface_area(p.d);
  return aw * std::expm1(-p.alpha * std::log(epsilon)) / p.alpha;
}

double small_jump_std(const ProcessParams& p, double epsilon) {
  p.validate();
  check_epsilon(epsilon);
  const double aw = constant_A(p) * sphere_surface_area(p.d);
  return std::sqrt(aw * std::pow(epsilon, 2.0 - p.alpha) / (p.d * (2.0 - p.alpha)));
}

Point sample_direction(int d, RngStream& rng) {
  Point u(d);
  double n2 = 0.0;
  do {
    n2 = 0.0;
    for (int i = 0; i < d; ++i) {
      u[i] = rng.normal();
      n2 += u[i] * u[i];
    }
  } while (n2 == 0.0);
  u *= 1.0 / std::sqrt(n2);
  return u;
}

namespace sim_detail {
Rates rates(const ProcessParams& p, double eps) {
  return {jump_rate(p, eps), small_jump_std(p, eps), eps};
}
}  // namespace sim_detail

Point sample_truncated_jump(const ProcessParams& p, double epsilon, RngStream& rng) {
  const double u = rng.uniform();
  double r = epsilon * std::pow(1.0 - u * (1.0 - std::pow(epsilon, p.alpha)), -1.0 / p.alpha);
  if (r >= 1.0) r = std::nextafter(1.0, 0.0);
  if (r < epsilon) r = epsilon;
  Point v = sample_direction(p.d, rng);
  v *= r;
  return v;
}

ExitRecord simulate_exit(const ProcessParams& p, const DomainShape& domain, const Point& start,
                         const SimConfig& cfg, RngStream& rng) {
  sim_detail::NoObserver none;
  return simulate_exit(p, domain, start, cfg, rng, none);
}

OccupationGrid::OccupationGrid(const Point& low, const Point& high, const std::vector<int>& cells)
    : low_(low), high_(high), cells_(cells) {
  if (low.dim() != high.dim() || static_cast<int>(cells.size()) != low.dim())
    throw Error(ErrorCode::DimensionMismatch, "grid corners and cell counts disagree");
  size_t total = 1;
  volume_ = 1.0;
  for (int i = 0; i < low.dim(); ++i) {
    if (!(high[i] > low[i]) || cells[static_cast<size_t>(i)] < 1)
      throw Error(ErrorCode::ParamOutOfRange, "degenerate occupation grid");
    width_.push_back((high[i] - low[i]) / cells[static_cast<size_t>(i)]);
    volume_ *= width_.back();
    total *= static_cast<size_t>(cells[static_cast<size_t>(i)]);
  }
  time_.assign(total, 0.0);
}

OccupationGrid OccupationGrid::uniform(const Point& low, const Point& high, int cells_per_axis) {
  return OccupationGrid(low, high, std::vector<int>(static_cast<size_t>(low.dim()), cells_per_axis));
}

long OccupationGrid::cell_index(const Point& x) const {
  long idx = 0;
  for (int i = 0; i < low_.dim(); ++i) {
    double f = (x[i] - low_[i]) / width_[static_cast<size_t>(i)];
    if (!(f >= 0.0)) return -1;
    long k = static_cast<long>(f);
    if (k >= cells_[static_cast<size_t>(i)]) return -1;
    idx = idx * cells_[static_cast<size_t>(i)] + k;
  }
  return idx;
}

Point OccupationGrid::cell_low(size_t idx) const {
  Point c(low_.dim());
  for (int i = low_.dim() - 1; i >= 0; --i) {
    size_t n = static_cast<size_t>(cells_[static_cast<size_t>(i)]);
    c[i] = low_[i] + static_cast<double>(idx % n) * width_[static_cast<size_t>(i)];
    idx /= n;
  }
  return c;
}

Point OccupationGrid::cell_center(size_t idx) const {
  Point c = cell_low(idx);
  for (int i = 0; i < c.dim(); ++i) c[i] += 0.5 * width_[static_cast<size_t>(i)];
  return c;
}

double OccupationGrid::total() const {
  double s = 0.0;
  for (double v : time_) s += v;
  return s;
}

void OccupationGrid::clear() { std::fill(time_.begin(), time_.end(), 0.0); }

void OccupationGrid::merge(const OccupationGrid& other) {
  if (other.time_.size() != time_.size()) throw Error(ErrorCode::DimensionMismatch, "grid shapes differ");
  for (size_t i = 0; i < time_.size(); ++i) time_[i] += other.time_[i];
}

OccupationGrid simulate_occupation(const ProcessParams& p, const DomainShape& domain, const Point& start,
                                   const OccupationGrid& grid, const SimConfig& cfg, RngStream& rng,
                                   ExitRecord* record) {
  if (grid.dim() != p.d) throw Error(ErrorCode::DimensionMismatch, "grid dimension differs from d");
  OccupationGrid g = grid;
  ExitRecord r = simulate_exit(p, domain, start, cfg, rng, g);
  if (record) *record = r;
  return g;
}

void BetaQuantileSpline::Half::build(double a_in, double b_in, int n) {
  a = a_in;
  b = b_in;
  beta = boost::math::beta(a, b);
  smax = std::pow(0.5, 1.0 / a);
  step = smax / n;
  v.resize(static_cast<size_t>(n) + 1);
  dv.resize(static_cast<size_t>(n) + 1);
  const double slope0 = std::pow(a * beta, 1.0 / a);
  v[0] = 0.0;
  dv[0] = slope0;
  for (int k = 1; k <= n; ++k) {
    double s = k * step;
    double u = std::pow(s, a);
    double q = boost::math::ibeta_inv(a, b, u);
    v[static_cast<size_t>(k)] = q;
    // dq/ds = a B (q/s)^{1-a} (1-q)^{1-b}
    dv[static_cast<size_t>(k)] = a * beta * std::pow(q / s, 1.0 - a) * std::pow(1.0 - q, 1.0 - b);
  }
}

double BetaQuantileSpline::Half::eval(double s) const {
  const size_t n = v.size() - 1;
  double f = s / step;
  size_t k = std::min(static_cast<size_t>(f), n - 1);
  double t = f - static_cast<double>(k);
  double t2 = t * t, t3 = t2 * t;
  double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t, h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
  return h00 * v[k] + h10 * step * dv[k] + h01 * v[k + 1] + h11 * step * dv[k + 1];
}

BetaQuantileSpline::BetaQuantileSpline(double a, int intervals) : a_(a) {
  if (!(a > 0.0 && a < 1.0)) throw Error(ErrorCode::ParamOutOfRange, "beta spline needs a in (0,1)");
  if (intervals < 2) throw Error(ErrorCode::ParamOutOfRange, "beta spline needs at least 2 intervals");
  lo_.build(a, 1.0 - a, intervals);
  hi_.build(1.0 - a, a, intervals);
}

void BetaQuantileSpline::quantile(double u, double& q, double& one_minus_q) const {
  if (u <= 0.5) {
    q = lo_.eval(std::pow(u, 1.0 / lo_.a));
    one_minus_q = 1.0 - q;
  } else {
    one_minus_q = hi_.eval(std::pow(1.0 - u, 1.0 / hi_.a));
    q = 1.0 - one_minus_q;
  }
}

const BetaQuantileSpline& ball_exit_spline(double alpha) {
  static std::mutex mu;
  static std::map<double, std::unique_ptr<BetaQuantileSpline>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[alpha];
  if (!slot) slot = std::make_unique<BetaQuantileSpline>(alpha / 2.0);
  return *slot;
}

namespace {

// Radius with P(|z-c| > rho) = I_{1/(1+W)}(alpha/2, 1-alpha/2), W = (rho^2-r^2)/(r^2-a^2).
double sample_exit_radius(const BetaQuantileSpline& spl, double radius, double a2, RngStream& rng) {
  const double r2 = radius * radius;
  while (true) {
    double q, omq;
    spl.quantile(rng.uniform(), q, omq);
    if (!(q > 0.0)) continue;
    double rho = std::sqrt(r2 + (r2 - a2) * (omq / q));
    if (rho > radius) return rho;
  }
}

}  // namespace

Point sample_stable_ball_exit(const ProcessParams& p, const Point& center, double radius, const Point& x,
                              RngStream& rng) {
  require_same_dim(center, p.d, "center");
  require_same_dim(x, p.d, "x");
  const double a2 = dist2(x, center);
  if (!(radius > 0.0) || !(a2 < radius * radius))
    throw Error(ErrorCode::PointNotInterior, "x must lie inside the ball");
  const BetaQuantileSpline& spl = ball_exit_spline(p.alpha);
  const double a = std::sqrt(a2);
  const double r2 = radius * radius;
  while (true) {
    const double rho = sample_exit_radius(spl, radius, a2, rng);
    Point z(p.d);
    if (a == 0.0) {
      z = center + rho * sample_direction(p.d, rng);
    } else {
      // angular density on the sphere of radius rho is proportional to |x - z|^{-d}
      while (true) {
        z = center + rho * sample_direction(p.d, rng);
        double ratio = (rho - a) / dist(z, x);
        if (rng.uniform() < std::pow(ratio, p.d)) break;
      }
    }
    if (dist2(z, center) > r2) return z;
  }
}

Point walk_on_spheres_exit(const ProcessParams& p, const DomainShape& domain, const Point& start, RngStream& rng,
                           long max_steps, long* steps_taken) {
  require_same_dim(start, p.d, "start");
  if (!domain.contains_unchecked(start)) throw Error(ErrorCode::PointNotInterior, "start is not in the domain");
  Point x = start;
  for (long k = 1; k <= max_steps; ++k) {
    double rho = domain.boundary_distance_unchecked(x);
    Point z = sample_stable_ball_exit(p, x, rho, x, rng);
    if (!domain.contains_unchecked(z)) {
      if (steps_taken) *steps_taken = k;
      return z;
    }
    x = z;
  }
  throw Error(ErrorCode::StepLimitExceeded, "walk on spheres exceeded " + std::to_string(max_steps) + " balls");
}

}  // namespace tsp
