#include <algorithm>
#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <numbers>
#include <vector>

#include "tsp/est/estimators.hpp"
#include "tsp/kernels/ball.hpp"
#include "tsp/kernels/constants.hpp"
#include "tsp/kernels/quadrature.hpp"

using namespace tsp;
using Catch::Approx;

namespace {

EstimatorConfig base_cfg(uint64_t seed = 7) {
  EstimatorConfig c;
  c.sim.seed = seed;
  c.sim.epsilon = 1e-3;
  c.sim.time_step = 1e-3;
  return c;
}

// Polar oracle: A int_theta int_rho rho^{-1-alpha} over the rays from y that
// cross the box, rho < 1.
double box_rate_polar(const ProcessParams& p, const Point& y, const Point& lo, const Point& hi) {
  const double a = p.alpha;
  auto ray = [&](double th) {
    const double c = std::cos(th), s = std::sin(th);
    double t0 = 0.0, t1 = 1.0;
    const double dir[2] = {c, s};
    for (int i = 0; i < 2; ++i) {
      if (std::abs(dir[i]) < 1e-300) {
        if (y[i] < lo[i] || y[i] > hi[i]) return 0.0;
        continue;
      }
      double u = (lo[i] - y[i]) / dir[i], v = (hi[i] - y[i]) / dir[i];
      if (u > v) std::swap(u, v);
      t0 = std::max(t0, u);
      t1 = std::min(t1, v);
    }
    if (!(t1 > t0)) return 0.0;
    return (std::pow(t0, -a) - std::pow(t1, -a)) / a;
  };
  std::vector<double> cuts{0.0, 2 * std::numbers::pi};
  for (double cx : {lo[0], hi[0]})
    for (double cy : {lo[1], hi[1]}) {
      double th = std::atan2(cy - y[1], cx - y[0]);
      if (th < 0) th += 2 * std::numbers::pi;
      cuts.push_back(th);
    }
  // angles where the unit circle crosses the box edges
  for (int i = 0; i < 2; ++i)
    for (double e : {lo[i], hi[i]}) {
      double du = e - y[i];
      if (std::abs(du) >= 1.0) continue;
      double w = std::sqrt(1 - du * du);
      for (double sgn : {-1.0, 1.0}) {
        double px = i == 0 ? du : sgn * w, py = i == 0 ? sgn * w : du;
        double th = std::atan2(py, px);
        if (th < 0) th += 2 * std::numbers::pi;
        cuts.push_back(th);
      }
    }
  std::sort(cuts.begin(), cuts.end());
  QuadratureConfig q;
  q.rel_tol = 1e-12;
  q.abs_tol = 1e-300;
  double total = 0.0;
  for (size_t i = 0; i + 1 < cuts.size(); ++i)
    if (cuts[i + 1] > cuts[i]) total += integrate(ray, cuts[i], cuts[i + 1], q).value;
  return constant_A(p) * total;
}

}  // namespace

TEST_CASE("target sets", "[est]") {
  auto ann = TargetSet::annulus(Point{0.0, 0.0}, 1.0, 2.0);
  CHECK(ann.contains(Point{1.0, 0.0}));
  CHECK_FALSE(ann.contains(Point{2.0, 0.0}));
  CHECK(ann.volume() == Approx(3 * std::numbers::pi));
  auto cell = TargetSet::polar_cell(Point{0.0, 0.0}, 1.0, 2.0, 0.0, std::numbers::pi / 2);
  CHECK(cell.contains(Point{1.0, 1.0}));
  CHECK_FALSE(cell.contains(Point{-1.0, 1.0}));
  CHECK(cell.volume() == Approx(0.75 * std::numbers::pi));
  auto box = TargetSet::shape(DomainShape::box(Point{0.0, 0.0}, Point{2.0, 0.5}));
  CHECK(box.volume() == Approx(1.0));
  CHECK_THROWS_AS(TargetSet::everything().volume(), Error);
  CHECK_THROWS_AS(TargetSet::annulus(Point{0.0, 0.0}, 2.0, 1.0), Error);
  auto cn = TargetSet::cn_set(2, 0.2, 3);
  CHECK(cn.contains(Point{0.0, -1.0}));
  CHECK_FALSE(cn.contains(Point{0.0, 0.0}));
}

TEST_CASE("harmonic measure of the whole complement is one", "[est]") {
  auto p = ProcessParams::make(2, 1.0);
  auto D = DomainShape::ball(Point{0.0, 0.0}, 0.125);
  auto e = harmonic_measure(p, D, Point{0.03, 0.0}, TargetSet::everything(), 500, base_cfg());
  CHECK(e.mean == 1.0);
  CHECK(e.std_error == 0.0);
  CHECK(e.n == 500);
  CHECK(e.censored_fraction == 0.0);
}

TEST_CASE("mirror symmetry and linearity of exit masses", "[est]") {
  auto p = ProcessParams::make(2, 0.5);
  auto D = DomainShape::ball(Point{0.0, 0.0}, 0.125);
  const Point x{0.0, 0.0};
  auto cfg = base_cfg(11);
  const long n = 4000;
  auto left = TargetSet::predicate("left", [](const Point& y) { return y[0] < 0.0; });
  auto right = TargetSet::predicate("right", [](const Point& y) { return y[0] >= 0.0; });
  auto l = harmonic_measure(p, D, x, left, n, cfg);
  auto r = harmonic_measure(p, D, x, right, n, cfg);
  CHECK(l.mean + r.mean == Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(l.mean - 0.5) < 4 * l.std_error);

  std::vector<TargetSet> parts{TargetSet::annulus(x, 0.125, 0.2), TargetSet::annulus(x, 0.2, 0.4),
                               TargetSet::annulus(x, 0.4, 1.2)};
  auto masses = exit_mass_histogram(p, D, x, parts, n, cfg);
  auto dens = exit_density_histogram(p, D, x, parts, n, cfg);
  double total = 0.0;
  for (size_t j = 0; j < parts.size(); ++j) {
    auto single = harmonic_measure(p, D, x, parts[j], n, cfg);
    CHECK(single.mean == masses[j].mean);
    CHECK(single.std_error == Approx(masses[j].std_error).epsilon(1e-12));
    CHECK(dens[j].mean * parts[j].volume() == Approx(masses[j].mean).epsilon(1e-12));
    total += masses[j].mean;
  }
  // exits are within 1 + 0.125 of the centre
  CHECK(total == Approx(1.0).epsilon(1e-14));
}

TEST_CASE("results do not depend on the worker count", "[est]") {
  auto p = ProcessParams::make(2, 1.5);
  auto D = DomainShape::ball(Point{0.0, 0.0}, 0.125);
  auto cfg = base_cfg(5);
  cfg.block = 64;
  auto t = TargetSet::annulus(Point{0.0, 0.0}, 0.125, 0.2);
  auto a = harmonic_measure(p, D, Point{0.05, 0.0}, t, 1000, cfg);
  cfg.threads = 3;
  auto b = harmonic_measure(p, D, Point{0.05, 0.0}, t, 1000, cfg);
  CHECK(a.mean == b.mean);
  CHECK(a.std_error == b.std_error);
  auto ga = green_density(p, D, Point{0.0, 0.0}, OccupationGrid::uniform(Point{-0.125, -0.125}, Point{0.125, 0.125}, 8),
                          300, cfg);
  cfg.threads = 1;
  auto gb = green_density(p, D, Point{0.0, 0.0}, OccupationGrid::uniform(Point{-0.125, -0.125}, Point{0.125, 0.125}, 8),
                          300, cfg);
  for (size_t i = 0; i < ga.cells.size(); ++i) CHECK(ga.cells[i].mean == gb.cells[i].mean);
}

// X and Y agree until the first jump longer than 1, which happens at rate
// B = nu(|z| > 1) and always leaves a ball of radius < 1/2. Hence
// E tau_X = E (1 - exp(-B tau_Y)) / B and, for S inside B(0, 1 - r),
// P(X_tau in S) = E exp(-B tau_Y) 1{Y_tau in S}.
TEST_CASE("killed truncated paths reproduce the stable ball laws", "[est]") {
  const double r = 0.125;
  for (double alpha : {0.5, 1.0, 1.5}) {
    auto p = ProcessParams::make(2, alpha);
    const double B = constant_A(p) * sphere_surface_area(2) / alpha;
    auto D = DomainShape::ball(Point{0.0, 0.0}, r);
    const Point x{0.04, 0.0};
    const double rho = 2 * r;
    auto cfg = base_cfg(21);
    PathMoments m = run_blocks(20000, run_options(cfg), PathMoments(2), [&](long, RngStream& rng, PathMoments& acc) {
      ExitRecord rec = simulate_exit(p, D, x, cfg.sim, rng);
      double v[2] = {-std::expm1(-B * rec.exit_time) / B,
                     rec.exit_position.norm() < rho ? std::exp(-B * rec.exit_time) : 0.0};
      acc.add(v);
    });
    const double T = expected_exit_time_ball(p, r, x).value;
    const double P = 1.0 - poisson_ball_radial_survival(p, r, x.norm(), rho);
    INFO("alpha " << alpha << " T " << T << " est " << m.mean(0) << " +- " << m.stderr_of_mean(0));
    INFO("P " << P << " est " << m.mean(1) << " +- " << m.stderr_of_mean(1));
    // 4 SE plus 2% for the time-step and small-jump bias
    CHECK(std::abs(m.mean(0) - T) < 4 * m.stderr_of_mean(0) + 0.02 * T);
    CHECK(std::abs(m.mean(1) - P) < 4 * m.stderr_of_mean(1) + 0.02 * P);
  }
}

TEST_CASE("green density integrates to the exit time", "[est]") {
  auto p = ProcessParams::make(2, 1.0);
  const double r = 0.125;
  auto D = DomainShape::ball(Point{0.0, 0.0}, r);
  auto grid = OccupationGrid::uniform(Point{-r, -r}, Point{r, r}, 10);
  auto g = green_density(p, D, Point{0.02, 0.01}, grid, 2000, base_cfg(3));
  double total = 0.0;
  for (const auto& c : g.cells) total += c.mean * grid.cell_volume();
  CHECK(total == Approx(g.exit_time.mean).epsilon(1e-10));
  auto t = mean_exit_time(p, D, Point{0.02, 0.01}, 2000, base_cfg(3));
  CHECK(t.mean == Approx(g.exit_time.mean).epsilon(1e-12));
  // Y has no long jumps, so it stays at least as long as X
  CHECK(t.mean > expected_exit_time_ball(p, r, Point{0.02, 0.01}).value - 4 * t.std_error);
}

TEST_CASE("box jump rate matches the polar oracle", "[est]") {
  for (double alpha : {0.5, 1.0, 1.5}) {
    auto p = ProcessParams::make(2, alpha);
    struct Case {
      Point y, lo, hi;
    };
    const Case cases[] = {
        {Point{0.0, 0.0}, Point{0.5, -0.1}, Point{0.7, 0.1}},
        {Point{0.0, 0.0}, Point{0.5, 0.3}, Point{1.4, 2.0}},    // clipped by the unit circle
        {Point{0.0, 0.05}, Point{-0.025, -5.0}, Point{0.025, -0.99}},  // C_n-like strip
        {Point{0.3, 0.2}, Point{0.0, -0.3}, Point{0.6, 0.1}},   // box straddles y1 and is close
        {Point{0.0, 0.0}, Point{-2.0, 0.95}, Point{2.0, 3.0}},  // thin cap
    };
    for (const auto& c : cases) {
      JumpRateBox2D k(p, c.lo, c.hi);
      double got = k.rate(c.y), want = box_rate_polar(p, c.y, c.lo, c.hi);
      INFO("alpha " << alpha << " y " << c.y[0] << "," << c.y[1] << " got " << got << " want " << want);
      CHECK(got == Approx(want).epsilon(1e-7));
    }
    JumpRateBox2D far(p, Point{2.0, 2.0}, Point{3.0, 3.0});
    CHECK(far.rate(Point{0.0, 0.0}) == 0.0);
  }
}

// Ray oracle for the polar cell: per direction, the jump lengths s < 1 that land in
// the annulus and in the wedge, with the s-integral in closed form.
double polar_cell_rate_rays(const ProcessParams& p, const Point& y, const Point& c, double r_lo, double r_hi,
                            double th_lo, double th_hi, int panels) {
  const double a = p.alpha;
  const double vx = y[0] - c[0], vy = y[1] - c[1];
  auto ray = [&](double phi) {
    const double ex = std::cos(phi), ey = std::sin(phi);
    const double b = vx * ex + vy * ey, a2 = vx * vx + vy * vy;
    // wedge: two half-planes through c
    double s0 = 0.0, s1 = 1.0;
    auto half = [&](double nx, double ny) {  // n.(v + s e) >= 0
      const double g0 = nx * vx + ny * vy, g1 = nx * ex + ny * ey;
      if (std::abs(g1) < 1e-300) {
        if (g0 < 0) s1 = -1.0;
        return;
      }
      const double s = -g0 / g1;
      if (g1 > 0) s0 = std::max(s0, s);
      else s1 = std::min(s1, s);
    };
    half(-std::sin(th_lo), std::cos(th_lo));
    half(std::sin(th_hi), -std::cos(th_hi));
    if (!(s1 > s0)) return 0.0;
    const double dh = b * b - a2 + r_hi * r_hi;
    if (dh <= 0) return 0.0;
    const double h0 = std::max(s0, -b - std::sqrt(dh)), h1 = std::min(s1, -b + std::sqrt(dh));
    if (!(h1 > h0)) return 0.0;
    auto piece = [&](double u, double v) { return v > u ? (std::pow(u, -a) - std::pow(v, -a)) / a : 0.0; };
    const double dl = b * b - a2 + r_lo * r_lo;
    if (dl <= 0) return piece(h0, h1);
    const double l0 = -b - std::sqrt(dl), l1 = -b + std::sqrt(dl);
    return piece(h0, std::min(h1, l0)) + piece(std::max(h0, l1), h1);
  };
  const double h = 2 * std::numbers::pi / panels;
  double s = 0.0;
  for (int i = 0; i < panels; ++i) s += ray(-std::numbers::pi + (i + 0.5) * h);
  return constant_A(p) * s * h;
}

TEST_CASE("polar cell jump rate matches the ray oracle", "[est]") {
  const double pi = std::numbers::pi;
  for (double alpha : {0.5, 1.0, 1.5}) {
    auto p = ProcessParams::make(2, alpha);
    const Point c{0.1, -0.2};
    struct Case {
      Point y;
      double r_lo, r_hi, th_lo, th_hi;
    };
    const Case cases[] = {
        {Point{0.1, -0.2}, 0.3, 0.5, 0.0, pi / 4},            // from the center
        {Point{0.2, -0.1}, 0.9, 1.05, -pi / 3, pi / 5},        // shell cell, partly out of range
        {Point{0.0, 0.0}, 0.5, 0.8, 3 * pi / 4, 5 * pi / 4},   // wedge across the negative axis
        {Point{0.15, -0.25}, 1.0, 1.1, 1.5 * pi, 1.75 * pi},   // angles above pi
    };
    for (const auto& k : cases) {
      JumpRatePolarCell2D f(p, c, k.r_lo, k.r_hi, k.th_lo, k.th_hi);
      const double got = f.rate(k.y), want = polar_cell_rate_rays(p, k.y, c, k.r_lo, k.r_hi, k.th_lo, k.th_hi, 200000);
      INFO("alpha " << alpha << " cell " << k.r_lo << " " << k.th_lo << " got " << got << " want " << want);
      CHECK(got == Approx(want).epsilon(1e-5));
    }
    // four quarter sectors make the annulus
    const Point y{0.05, 0.1};
    double sum = 0.0;
    for (int q = 0; q < 4; ++q) sum += JumpRatePolarCell2D(p, c, 0.6, 0.9, q * pi / 2, (q + 1) * pi / 2).rate(y);
    CHECK(sum == Approx(JumpRatePolarCell2D(p, c, 0.6, 0.9, 0.0, 2 * pi).rate(y)).epsilon(1e-9));
    CHECK(JumpRatePolarCell2D(p, c, 2.5, 3.0, 0.0, 1.0).rate(y) == 0.0);
  }
}

TEST_CASE("interpolated jump rate", "[est]") {
  auto p = ProcessParams::make(2, 1.0);
  auto exact = std::make_shared<JumpRateBox2D>(p, Point{0.5, 0.3}, Point{1.0, 0.8});
  GridJumpRate g(exact, Point{-0.2, -0.2}, Point{0.2, 0.2}, 40, 40);
  CHECK(g.rate(Point{-0.2, -0.2}) == exact->rate(Point{-0.2, -0.2}));
  CHECK(g.rate(Point{0.5, 0.0}) == exact->rate(Point{0.5, 0.0}));
  RngStream rng(1, 0);
  for (int i = 0; i < 50; ++i) {
    Point y{-0.2 + 0.4 * rng.uniform(), -0.2 + 0.4 * rng.uniform()};
    CHECK(g.rate(y) == Approx(exact->rate(y)).epsilon(2e-3));
  }
}

TEST_CASE("compensator agrees with direct hit counts", "[est]") {
  auto p = ProcessParams::make(2, 1.0);
  auto D = DomainShape::ball(Point{0.0, 0.0}, 0.125);
  const Point lo{0.3, -0.2}, hi{0.6, 0.2};
  JumpRateBox2D k(p, lo, hi);
  CompensatorOptions opt;
  opt.with_exit_time = true;
  opt.hit_targets.push_back(TargetSet::shape(DomainShape::box(lo, hi)));
  auto m = compensator_moments(p, D, Point{0.05, 0.0}, {&k}, 20000, base_cfg(4), opt);
  REQUIRE(m.k == 3);
  const double diff = m.mean(0) - m.mean(2);
  const double se = std::sqrt((m.cov(0, 0) + m.cov(2, 2) - 2 * m.cov(0, 2)) / m.n);
  INFO("comp " << m.mean(0) << " +- " << m.stderr_of_mean(0) << " hits " << m.mean(2) << " +- " << m.stderr_of_mean(2));
  CHECK(m.mean(2) > 0.0);
  CHECK(std::abs(diff) < 4 * se);
  // the compensator has the smaller variance
  CHECK(m.stderr_of_mean(0) < m.stderr_of_mean(2));
  auto e = harmonic_measure_compensated(p, D, Point{0.05, 0.0}, k, 20000, base_cfg(4));
  CHECK(e.mean == Approx(m.mean(0)).epsilon(1e-12));
}

TEST_CASE("harnack ratio input checks and the diagonal", "[est]") {
  auto p = ProcessParams::make(2, 1.0);
  const double r = 0.125;
  JumpRateBox2D k(p, Point{0.5, -0.1}, Point{0.7, 0.1});
  auto cfg = base_cfg(9);
  // cap is 1/r - 1/2 = 7.5
  CHECK_THROWS_AS(harnack_ratio_profile(p, Point{-0.5, 0.0}, Point{0.5, 0.0}, r, k, 10, cfg), Error);
  try {
    harnack_ratio_profile(p, Point{-0.5, 0.0}, Point{0.5, 0.0}, r, k, 10, cfg);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::CapViolated);
  }
  try {
    harnack_ratio_profile(p, Point{0.0, 0.0}, Point{0.1, 0.0}, 0.3, k, 10, cfg);
    FAIL("expected RadiusTooLarge");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::RadiusTooLarge);
  }
  auto same = harnack_ratio_profile(p, Point{0.0, 0.0}, Point{0.0, 0.0}, r, k, 200, cfg);
  CHECK(same.ratio == 1.0);
  CHECK(same.u1.mean == same.u2.mean);
  auto h = harnack_ratio_profile(p, Point{-0.05, 0.0}, Point{0.05, 0.0}, r, k, 2000, cfg);
  CHECK(h.M == Approx(0.8));
  CHECK(h.ratio > 0.0);
  CHECK(h.std_error > 0.0);
  // the target lies to the right, so x2 is the better placed start
  CHECK(h.u2.mean > h.u1.mean);
}
