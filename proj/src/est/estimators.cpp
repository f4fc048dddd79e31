#include "tsp/est/estimators.hpp"

#include <boost/math/special_functions/beta.hpp>
#include <numbers>

#include "tsp/kernels/constants.hpp"
#include "tsp/kernels/quadrature.hpp"
#include "tsp/kernels/r0.hpp"

namespace tsp {

RunOptions run_options(const EstimatorConfig& cfg) {
  RunOptions o;
  o.seed = cfg.sim.seed;
  o.threads = cfg.threads;
  o.block = cfg.block;
  o.stream_offset = cfg.stream_offset;
  return o;
}

TargetSet TargetSet::annulus(const Point& center, double r_inner, double r_outer) {
  if (!(r_inner >= 0.0 && r_outer > r_inner)) throw Error(ErrorCode::ParamOutOfRange, "annulus needs 0 <= r < R");
  return TargetSet(AnnulusTarget{center, r_inner, r_outer});
}

TargetSet TargetSet::shape(const DomainShape& s) { return TargetSet(ShapeTarget{s}); }

TargetSet TargetSet::predicate(std::string name, std::function<bool(const Point&)> test, double volume) {
  return TargetSet(PredicateTarget{std::move(name), std::move(test), volume});
}

TargetSet TargetSet::polar_cell(const Point& center, double r_lo, double r_hi, double th_lo, double th_hi) {
  if (center.dim() != 2) throw Error(ErrorCode::DimensionMismatch, "polar cells are two-dimensional");
  if (!(r_lo >= 0.0 && r_hi > r_lo && th_hi > th_lo && th_lo >= 0.0 && th_hi <= 2 * std::numbers::pi + 1e-12))
    throw Error(ErrorCode::ParamOutOfRange, "bad polar cell");
  return TargetSet(PolarCellTarget{center, r_lo, r_hi, th_lo, th_hi});
}

TargetSet TargetSet::cn_set(int d, double r1, int n) {
  CnSet c(d, r1, n);
  return predicate("cn_set", [c](const Point& y) { return c.contains(y); });
}

TargetSet TargetSet::everything() {
  return predicate("everything", [](const Point&) { return true; });
}

bool TargetSet::contains(const Point& y) const {
  struct V {
    const Point& y;
    bool operator()(const AnnulusTarget& a) const {
      double q = dist2(y, a.center);
      return q >= a.r_inner * a.r_inner && q < a.r_outer * a.r_outer;
    }
    bool operator()(const ShapeTarget& s) const { return s.shape.contains_unchecked(y); }
    bool operator()(const PredicateTarget& p) const { return p.test(y); }
    bool operator()(const PolarCellTarget& c) const {
      double dx = y[0] - c.center[0], dy = y[1] - c.center[1];
      double q = dx * dx + dy * dy;
      if (q < c.r_lo * c.r_lo || !(q < c.r_hi * c.r_hi)) return false;
      double th = std::atan2(dy, dx);
      if (th < 0) th += 2 * std::numbers::pi;
      return th >= c.th_lo && th < c.th_hi;
    }
  };
  return std::visit(V{y}, v_);
}

namespace {
double ball_volume(int d, double r) { return sphere_surface_area(d) / d * std::pow(r, d); }
}  // namespace

double TargetSet::volume() const {
  struct V {
    double operator()(const AnnulusTarget& a) const {
      const int d = a.center.dim();
      if (std::isinf(a.r_outer)) throw Error(ErrorCode::ParamOutOfRange, "unbounded annulus");
      return ball_volume(d, a.r_outer) - ball_volume(d, a.r_inner);
    }
    double operator()(const ShapeTarget& s) const {
      const auto& v = s.shape.variant();
      if (auto b = std::get_if<Ball>(&v)) return ball_volume(b->center.dim(), b->radius);
      if (auto b = std::get_if<AxisBox>(&v)) {
        double vol = 1.0;
        for (int i = 0; i < b->low.dim(); ++i) vol *= b->high[i] - b->low[i];
        return vol;
      }
      if (auto a = std::get_if<Annulus>(&v))
        return ball_volume(a->center.dim(), a->r_outer) - ball_volume(a->center.dim(), a->r_inner);
      throw Error(ErrorCode::ParamOutOfRange, std::string("no volume for shape ") + s.shape.kind());
    }
    double operator()(const PredicateTarget& p) const {
      if (p.volume < 0) throw Error(ErrorCode::ParamOutOfRange, "no volume for predicate " + p.name);
      return p.volume;
    }
    double operator()(const PolarCellTarget& c) const {
      return 0.5 * (c.th_hi - c.th_lo) * (c.r_hi * c.r_hi - c.r_lo * c.r_lo);
    }
  };
  return std::visit(V{}, v_);
}

MCEstimate estimate_from(const PathMoments& m, int column, uint64_t seed) {
  MCEstimate e;
  e.mean = m.mean(column);
  e.std_error = m.stderr_of_mean(column);
  e.n = m.n;
  e.seed = seed;
  e.censored_fraction = m.censored_fraction();
  return e;
}

namespace {

void check_start(const ProcessParams& p, const DomainShape& domain, const Point& x, long n) {
  p.validate();
  require_same_dim(x, p.d, "x");
  if (domain.dim() != p.d) throw Error(ErrorCode::DimensionMismatch, "domain dimension differs from d");
  if (!domain.contains(x)) throw Error(ErrorCode::PointNotInterior, "start is not in the domain");
  if (n < 1) throw Error(ErrorCode::ParamOutOfRange, "n must be >= 1");
}

void check_censoring(const PathMoments& m) {
  if (m.n == 0 && m.censored > 0) throw Error(ErrorCode::AllPathsCensored, "every path hit max_time");
}

// Column values per path; the callback fills k doubles from the exit record.
template <class Fill, class Observer>
PathMoments moments(const ProcessParams& p, const DomainShape& domain, const Point& x, int k, long n,
                    const EstimatorConfig& cfg, Fill fill, const Observer& proto_obs) {
  PathMoments proto(k);
  return run_blocks(n, run_options(cfg), proto, [&](long, RngStream& rng, PathMoments& acc) {
    Observer obs = proto_obs;
    ExitRecord rec = simulate_exit(p, domain, x, cfg.sim, rng, obs);
    if (rec.censored) {
      acc.add_censored();
      return;
    }
    double v[64];
    fill(rec, obs, v);
    acc.add(v);
  });
}

}  // namespace

MCEstimate harmonic_measure(const ProcessParams& p, const DomainShape& domain, const Point& x,
                            const TargetSet& target, long n, const EstimatorConfig& cfg) {
  check_start(p, domain, x, n);
  PathMoments m = moments(
      p, domain, x, 1, n, cfg,
      [&](const ExitRecord& r, const sim_detail::NoObserver&, double* v) { v[0] = target.contains(r.exit_position); },
      sim_detail::NoObserver{});
  check_censoring(m);
  return estimate_from(m, 0, cfg.sim.seed);
}

namespace {

struct CellCounts {
  std::vector<long> hits;
  long n = 0, censored = 0;
  void merge(const CellCounts& o) {
    for (size_t i = 0; i < hits.size(); ++i) hits[i] += o.hits[i];
    n += o.n;
    censored += o.censored;
  }
};

CellCounts count_cells(const ProcessParams& p, const DomainShape& domain, const Point& x,
                       const std::vector<TargetSet>& partition, long n, const EstimatorConfig& cfg) {
  check_start(p, domain, x, n);
  CellCounts proto;
  proto.hits.assign(partition.size(), 0);
  CellCounts c = run_blocks(n, run_options(cfg), proto, [&](long, RngStream& rng, CellCounts& acc) {
    ExitRecord rec = simulate_exit(p, domain, x, cfg.sim, rng);
    if (rec.censored) {
      ++acc.censored;
      return;
    }
    ++acc.n;
    for (size_t j = 0; j < partition.size(); ++j)
      if (partition[j].contains(rec.exit_position)) {
        ++acc.hits[j];
        break;
      }
  });
  if (c.n == 0 && c.censored > 0) throw Error(ErrorCode::AllPathsCensored, "every path hit max_time");
  return c;
}

MCEstimate binomial(long hits, long n, long censored, uint64_t seed, double scale) {
  MCEstimate e;
  e.n = n;
  e.seed = seed;
  e.censored_fraction = double(censored) / double(n + censored);
  if (n == 0) return e;
  const double ph = double(hits) / n;
  e.mean = ph * scale;
  e.std_error = n > 1 ? std::sqrt(ph * (1 - ph) * n / (n - 1) / n) * scale : 0.0;
  return e;
}

}  // namespace

std::vector<MCEstimate> exit_mass_histogram(const ProcessParams& p, const DomainShape& domain, const Point& x,
                                            const std::vector<TargetSet>& partition, long n,
                                            const EstimatorConfig& cfg) {
  CellCounts c = count_cells(p, domain, x, partition, n, cfg);
  std::vector<MCEstimate> out;
  for (size_t j = 0; j < partition.size(); ++j) out.push_back(binomial(c.hits[j], c.n, c.censored, cfg.sim.seed, 1.0));
  return out;
}

std::vector<MCEstimate> exit_density_histogram(const ProcessParams& p, const DomainShape& domain, const Point& x,
                                               const std::vector<TargetSet>& partition, long n,
                                               const EstimatorConfig& cfg) {
  std::vector<double> vols;
  for (const auto& t : partition) vols.push_back(t.volume());
  CellCounts c = count_cells(p, domain, x, partition, n, cfg);
  std::vector<MCEstimate> out;
  for (size_t j = 0; j < partition.size(); ++j)
    out.push_back(binomial(c.hits[j], c.n, c.censored, cfg.sim.seed, 1.0 / vols[j]));
  return out;
}

namespace {

// Dense per-path scratch with a touched list, folded into sums at path end.
struct OccupationScratch {
  const OccupationGrid* grid = nullptr;
  std::vector<double> t;
  std::vector<long> touched;
  void on_step(const Point& y, double dt) {
    long i = grid->cell_index(y);
    if (i < 0) return;
    if (t[static_cast<size_t>(i)] == 0.0) touched.push_back(i);
    t[static_cast<size_t>(i)] += dt;
  }
};

struct GreenAcc {
  std::vector<double> sum, sumsq;
  double tsum = 0, tsq = 0;
  long n = 0, censored = 0;
  void merge(const GreenAcc& o) {
    for (size_t i = 0; i < sum.size(); ++i) {
      sum[i] += o.sum[i];
      sumsq[i] += o.sumsq[i];
    }
    tsum += o.tsum;
    tsq += o.tsq;
    n += o.n;
    censored += o.censored;
  }
};

MCEstimate from_sums(double s, double sq, long n, long censored, uint64_t seed, double scale) {
  MCEstimate e;
  e.n = n;
  e.seed = seed;
  e.censored_fraction = (n + censored) > 0 ? double(censored) / double(n + censored) : 0.0;
  if (n == 0) return e;
  e.mean = s / n * scale;
  if (n > 1) e.std_error = std::sqrt(std::max(0.0, (sq - s * s / n) / (n - 1)) / n) * scale;
  return e;
}

}  // namespace

GreenDensity green_density(const ProcessParams& p, const DomainShape& domain, const Point& x,
                           const OccupationGrid& grid, long n, const EstimatorConfig& cfg) {
  check_start(p, domain, x, n);
  if (grid.dim() != p.d) throw Error(ErrorCode::DimensionMismatch, "grid dimension differs from d");
  GreenAcc proto;
  proto.sum.assign(grid.size(), 0.0);
  proto.sumsq.assign(grid.size(), 0.0);
  // one scratch per thread slot is not needed: each path builds its own sparse list
  GreenAcc acc = run_blocks(n, run_options(cfg), proto, [&](long, RngStream& rng, GreenAcc& a) {
    thread_local OccupationScratch scratch;
    if (scratch.grid != &grid || scratch.t.size() != grid.size()) {
      scratch.grid = &grid;
      scratch.t.assign(grid.size(), 0.0);
      scratch.touched.clear();
    }
    ExitRecord rec = simulate_exit(p, domain, x, cfg.sim, rng, scratch);
    if (rec.censored) {
      ++a.censored;
    } else {
      ++a.n;
      a.tsum += rec.exit_time;
      a.tsq += rec.exit_time * rec.exit_time;
      for (long i : scratch.touched) {
        double v = scratch.t[static_cast<size_t>(i)];
        a.sum[static_cast<size_t>(i)] += v;
        a.sumsq[static_cast<size_t>(i)] += v * v;
      }
    }
    for (long i : scratch.touched) scratch.t[static_cast<size_t>(i)] = 0.0;
    scratch.touched.clear();
  });
  if (acc.n == 0 && acc.censored > 0) throw Error(ErrorCode::AllPathsCensored, "every path hit max_time");
  GreenDensity g;
  g.grid = grid;
  g.grid.clear();
  const double inv_vol = 1.0 / grid.cell_volume();
  for (size_t i = 0; i < grid.size(); ++i)
    g.cells.push_back(from_sums(acc.sum[i], acc.sumsq[i], acc.n, acc.censored, cfg.sim.seed, inv_vol));
  g.exit_time = from_sums(acc.tsum, acc.tsq, acc.n, acc.censored, cfg.sim.seed, 1.0);
  return g;
}

MCEstimate mean_exit_time(const ProcessParams& p, const DomainShape& domain, const Point& x, long n,
                          const EstimatorConfig& cfg) {
  check_start(p, domain, x, n);
  PathMoments m = moments(
      p, domain, x, 1, n, cfg,
      [&](const ExitRecord& r, const sim_detail::NoObserver&, double* v) { v[0] = r.exit_time; },
      sim_detail::NoObserver{});
  check_censoring(m);
  return estimate_from(m, 0, cfg.sim.seed);
}

JumpRateBox2D::JumpRateBox2D(const ProcessParams& p, const Point& low, const Point& high, double rel_tol)
    : p_(p), low_(low), high_(high), rel_tol_(rel_tol) {
  p.validate();
  if (p.d != 2) throw Error(ErrorCode::DimensionMismatch, "box jump rates are two-dimensional");
  require_same_dim(low, 2, "low");
  require_same_dim(high, 2, "high");
  if (!(high[0] > low[0] && high[1] > low[1])) throw Error(ErrorCode::ParamOutOfRange, "empty target box");
  A_ = constant_A(p);
  s_ = 0.5 * (2.0 + p.alpha);
}

// int_{u0}^{u1} (u^2 + b^2)^{-s} du
double JumpRateBox2D::inner(double b, double u0, double u1) const {
  if (!(u1 > u0)) return 0.0;
  const double c = s_ - 0.5;
  if (u0 < 0.0 && u1 > 0.0) return inner(b, 0.0, -u0) + inner(b, 0.0, u1);
  if (u1 <= 0.0) return inner(b, -u1, -u0);
  // 0 <= u0 < u1
  if (b <= 1e-12 * std::max(u0, 1e-300)) {
    const double e = 1.0 - 2.0 * s_;
    return (std::pow(u1, e) - std::pow(u0, e)) / e;
  }
  const double pre = 0.5 * std::pow(b, 1.0 - 2.0 * s_);
  auto tail = [&](double u) {  // B_{b^2/(u^2+b^2)}(c, 1/2): the integral from u to infinity
    return boost::math::beta(c, 0.5, b * b / (u * u + b * b));
  };
  if (u0 == 0.0) return pre * boost::math::beta(0.5, c, u1 * u1 / (u1 * u1 + b * b));
  return pre * (tail(u0) - tail(u1));
}

double JumpRateBox2D::rate(const Point& y) const {
  // distance from y to the box
  double dx = std::max({low_[0] - y[0], 0.0, y[0] - high_[0]});
  double dy = std::max({low_[1] - y[1], 0.0, y[1] - high_[1]});
  if (dx * dx + dy * dy >= 1.0) return 0.0;
  const double z_lo = std::max(low_[1], y[1] - 1.0), z_hi = std::min(high_[1], y[1] + 1.0);
  if (!(z_hi > z_lo)) return 0.0;
  auto f = [&](double z2) {
    const double b = z2 - y[1];
    const double w = std::sqrt(std::max(0.0, 1.0 - b * b));
    const double u0 = std::max(low_[0], y[0] - w) - y[0], u1 = std::min(high_[0], y[0] + w) - y[0];
    return inner(std::abs(b), u0, u1);
  };
  // split where the unit circle meets the vertical box edges and at z2 = y2
  std::vector<double> cuts{z_lo, z_hi};
  for (double e : {low_[0], high_[0]}) {
    double du = e - y[0];
    if (std::abs(du) < 1.0) {
      double h = std::sqrt(1.0 - du * du);
      for (double z : {y[1] - h, y[1] + h})
        if (z > z_lo && z < z_hi) cuts.push_back(z);
    }
  }
  if (y[1] > z_lo && y[1] < z_hi) cuts.push_back(y[1]);
  std::sort(cuts.begin(), cuts.end());
  QuadratureConfig q;
  q.rel_tol = rel_tol_;
  q.abs_tol = 1e-300;
  double total = 0.0;
  for (size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i], b = cuts[i + 1];
    if (!(b > a)) continue;
    // sqrt behaviour where the circle is tangent: z2 = a + (b-a) t^2 or mirrored
    const bool lo_tangent = std::abs(a - (y[1] - 1.0)) < 1e-15;
    const bool hi_tangent = std::abs(b - (y[1] + 1.0)) < 1e-15;
    if (lo_tangent) {
      total += integrate([&](double t) { return f(a + (b - a) * t * t) * 2 * t * (b - a); }, 0.0, 1.0, q).value;
    } else if (hi_tangent) {
      total += integrate([&](double t) { return f(b - (b - a) * t * t) * 2 * t * (b - a); }, 0.0, 1.0, q).value;
    } else {
      total += integrate(f, a, b, q).value;
    }
  }
  return A_ * total;
}

JumpRatePolarCell2D::JumpRatePolarCell2D(const ProcessParams& p, const Point& center, double rho_lo, double rho_hi,
                                         double th_lo, double th_hi, double rel_tol)
    : p_(p), c_(center), rho_lo_(rho_lo), rho_hi_(rho_hi), th_lo_(th_lo), th_hi_(th_hi), rel_tol_(rel_tol) {
  p.validate();
  if (p.d != 2) throw Error(ErrorCode::DimensionMismatch, "polar cell jump rates are two-dimensional");
  require_same_dim(center, 2, "center");
  if (!(rho_lo >= 0.0 && rho_hi > rho_lo && th_hi > th_lo)) throw Error(ErrorCode::ParamOutOfRange, "bad polar cell");
  A_ = constant_A(p);
}

double JumpRatePolarCell2D::rate(const Point& y) const {
  const double vx = y[0] - c_[0], vy = y[1] - c_[1];
  const double a = std::sqrt(vx * vx + vy * vy), phi = std::atan2(vy, vx);
  if (rho_hi_ <= a - 1.0 || rho_lo_ >= a + 1.0) return 0.0;
  const double e = -0.5 * (2.0 + p_.alpha);
  const double two_pi = 2 * std::numbers::pi;
  QuadratureConfig q;
  q.rel_tol = rel_tol_;
  q.abs_tol = 1e-300;
  auto angular = [&](double rho) {
    // allowed arc |theta - phi| < beta
    double beta;
    if (a == 0.0) {
      beta = rho < 1.0 ? std::numbers::pi : 0.0;
    } else {
      const double g = (a * a + rho * rho - 1.0) / (2 * a * rho);
      beta = g <= -1.0 ? std::numbers::pi : (g >= 1.0 ? 0.0 : std::acos(g));
    }
    if (beta <= 0.0) return 0.0;
    auto f = [&](double th) { return std::pow(a * a + rho * rho - 2 * a * rho * std::cos(th - phi), e); };
    double total = 0.0;
    if (beta >= std::numbers::pi) return integrate(f, th_lo_, th_hi_, q).value * rho;
    for (int k = -1; k <= 1; ++k) {
      const double lo = std::max(th_lo_, phi - beta + k * two_pi), hi = std::min(th_hi_, phi + beta + k * two_pi);
      if (hi > lo) total += integrate(f, lo, hi, q).value;
    }
    return total * rho;
  };
  std::vector<double> cuts{std::max(rho_lo_, a - 1.0), std::min(rho_hi_, a + 1.0)};
  for (double b : {1.0 - a, a - 1.0, 1.0 + a})
    if (b > cuts[0] && b < cuts[1]) cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  double total = 0.0;
  for (size_t i = 0; i + 1 < cuts.size(); ++i)
    if (cuts[i + 1] > cuts[i]) total += integrate(angular, cuts[i], cuts[i + 1], q).value;
  return A_ * total;
}

GridJumpRate::GridJumpRate(std::shared_ptr<const JumpRateField> exact, const Point& low, const Point& high, int nx,
                           int ny)
    : exact_(std::move(exact)), low_(low), high_(high), nx_(nx), ny_(ny) {
  require_same_dim(low, 2, "low");
  require_same_dim(high, 2, "high");
  if (nx < 1 || ny < 1 || !(high[0] > low[0] && high[1] > low[1]))
    throw Error(ErrorCode::ParamOutOfRange, "bad interpolation grid");
  hx_ = (high[0] - low[0]) / nx;
  hy_ = (high[1] - low[1]) / ny;
  v_.resize(static_cast<size_t>((nx + 1) * (ny + 1)));
  for (int i = 0; i <= nx; ++i)
    for (int j = 0; j <= ny; ++j)
      v_[static_cast<size_t>(i * (ny + 1) + j)] = exact_->rate(Point{low[0] + i * hx_, low[1] + j * hy_});
}

double GridJumpRate::rate(const Point& y) const {
  const double fx = (y[0] - low_[0]) / hx_, fy = (y[1] - low_[1]) / hy_;
  if (!(fx >= 0.0 && fy >= 0.0 && fx <= nx_ && fy <= ny_)) return exact_->rate(y);
  const int i = std::min(static_cast<int>(fx), nx_ - 1), j = std::min(static_cast<int>(fy), ny_ - 1);
  const double tx = fx - i, ty = fy - j;
  auto at = [&](int a, int b) { return v_[static_cast<size_t>(a * (ny_ + 1) + b)]; };
  return (1 - tx) * ((1 - ty) * at(i, j) + ty * at(i, j + 1)) + tx * ((1 - ty) * at(i + 1, j) + ty * at(i + 1, j + 1));
}

namespace {
struct CompensatorObserver {
  const std::vector<const JumpRateField*>* fields = nullptr;
  double acc[32] = {};
  void on_step(const Point& y, double dt) {
    for (size_t j = 0; j < fields->size(); ++j) acc[j] += (*fields)[j]->rate(y) * dt;
  }
};
}  // namespace

PathMoments compensator_moments(const ProcessParams& p, const DomainShape& domain, const Point& x,
                                const std::vector<const JumpRateField*>& fields, long n, const EstimatorConfig& cfg,
                                const CompensatorOptions& opt) {
  check_start(p, domain, x, n);
  const int k = static_cast<int>(fields.size());
  const int cols = k + (opt.with_exit_time ? 1 : 0) + static_cast<int>(opt.hit_targets.size());
  if (k > 32 || cols > 64) throw Error(ErrorCode::ParamOutOfRange, "too many compensator fields");
  CompensatorObserver proto_obs;
  proto_obs.fields = &fields;
  PathMoments m = moments(
      p, domain, x, cols, n, cfg,
      [&](const ExitRecord& r, const CompensatorObserver& obs, double* v) {
        int c = 0;
        for (int j = 0; j < k; ++j) v[c++] = obs.acc[j];
        if (opt.with_exit_time) v[c++] = r.exit_time;
        for (const auto& t : opt.hit_targets) v[c++] = t.contains(r.exit_position) ? 1.0 : 0.0;
      },
      proto_obs);
  check_censoring(m);
  return m;
}

MCEstimate harmonic_measure_compensated(const ProcessParams& p, const DomainShape& domain, const Point& x,
                                        const JumpRateField& field, long n, const EstimatorConfig& cfg) {
  PathMoments m = compensator_moments(p, domain, x, {&field}, n, cfg);
  return estimate_from(m, 0, cfg.sim.seed);
}

HarnackResult harnack_values(const ProcessParams& p, const Point& x1, const Point& x2, double r,
                             const JumpRateField* field, const TargetSet* target, long n,
                             const EstimatorConfig& cfg) {
  p.validate();
  require_same_dim(x1, p.d, "x1");
  require_same_dim(x2, p.d, "x2");
  if (!(r > 0.0)) throw Error(ErrorCode::ParamOutOfRange, "r must be positive");
  if ((field == nullptr) == (target == nullptr))
    throw Error(ErrorCode::ParamOutOfRange, "exactly one of field and target is required");
  const DomainShape U = DomainShape::ball_union({Ball{x1, r}, Ball{x2, r}});
  std::vector<const JumpRateField*> fields;
  if (field) fields.push_back(field);
  PathMoments proto(2);
  PathMoments m = run_blocks(n, run_options(cfg), proto, [&](long, RngStream& rng, PathMoments& acc) {
    RngStream rng2 = rng;  // common random numbers for the second start
    double v[2];
    const Point* starts[2] = {&x1, &x2};
    RngStream* streams[2] = {&rng, &rng2};
    for (int s = 0; s < 2; ++s) {
      CompensatorObserver obs;
      obs.fields = &fields;
      ExitRecord rec = simulate_exit(p, U, *starts[s], cfg.sim, *streams[s], obs);
      if (rec.censored) {
        acc.add_censored();
        return;
      }
      v[s] = field ? obs.acc[0] : (target->contains(rec.exit_position) ? 1.0 : 0.0);
    }
    acc.add(v);
  });
  check_censoring(m);
  HarnackResult h;
  h.M = dist(x1, x2) / r;
  h.u1 = estimate_from(m, 0, cfg.sim.seed);
  h.u2 = estimate_from(m, 1, cfg.sim.seed);
  if (x1 == x2) {
    h.ratio = 1.0;
    h.std_error = 0.0;
  } else {
    h.ratio = m.mean(1) > 0.0 ? m.ratio(0, 1) : std::numeric_limits<double>::infinity();
    h.std_error = m.ratio_stderr(0, 1);
  }
  return h;
}

namespace {
void harnack_checks(const ProcessParams& p, const Point& x1, const Point& x2, double r) {
  const double r0 = compute_r0(p);
  if (!(r < r0)) throw Error(ErrorCode::RadiusTooLarge, "r must be below r0 = " + std::to_string(r0));
  const double M = dist(x1, x2) / r, cap = 1.0 / r - 0.5;
  if (M > cap)
    throw Error(ErrorCode::CapViolated,
                "M = " + std::to_string(M) + " exceeds the cap 1/r - 1/2 = " + std::to_string(cap));
}
}  // namespace

HarnackResult harnack_ratio_profile(const ProcessParams& p, const Point& x1, const Point& x2, double r,
                                    const TargetSet& far_target, long n, const EstimatorConfig& cfg) {
  harnack_checks(p, x1, x2, r);
  return harnack_values(p, x1, x2, r, nullptr, &far_target, n, cfg);
}

HarnackResult harnack_ratio_profile(const ProcessParams& p, const Point& x1, const Point& x2, double r,
                                    const JumpRateField& far_target, long n, const EstimatorConfig& cfg) {
  harnack_checks(p, x1, x2, r);
  return harnack_values(p, x1, x2, r, &far_target, nullptr, n, cfg);
}

}  // namespace tsp
