#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "tsp/core.hpp"
#include "tsp/domains/domain.hpp"
#include "tsp/est/batch.hpp"
#include "tsp/sim/simulator.hpp"

namespace tsp {

struct MCEstimate {
  double mean = 0.0;
  double std_error = 0.0;  // sample standard deviation / sqrt(n)
  long n = 0;              // uncensored paths
  uint64_t seed = 0;
  double censored_fraction = 0.0;
};

struct EstimatorConfig {
  SimConfig sim;
  int threads = 1;
  long block = 1024;
  uint64_t stream_offset = 0;  // first RNG stream; separates independent sub-runs
};

RunOptions run_options(const EstimatorConfig& cfg);

// Annulus A(center, r, R) = {r <= |y - center| < R}.
struct AnnulusTarget {
  Point center;
  double r_inner = 0.0, r_outer = 0.0;
};

// d = 2 polar cell {r_lo <= |y-c| < r_hi, th_lo <= arg(y-c) < th_hi}, angles in [0, 2 pi).
struct PolarCellTarget {
  Point center;
  double r_lo = 0.0, r_hi = 0.0, th_lo = 0.0, th_hi = 0.0;
};

struct ShapeTarget {
  DomainShape shape;
};

struct PredicateTarget {
  std::string name;
  std::function<bool(const Point&)> test;
  double volume = -1.0;  // negative when unknown
};

class TargetSet {
 public:
  using Variant = std::variant<AnnulusTarget, ShapeTarget, PredicateTarget, PolarCellTarget>;

  static TargetSet annulus(const Point& center, double r_inner, double r_outer);
  static TargetSet shape(const DomainShape& s);
  static TargetSet predicate(std::string name, std::function<bool(const Point&)> test, double volume = -1.0);
  static TargetSet polar_cell(const Point& center, double r_lo, double r_hi, double th_lo, double th_hi);
  // Named predicates: "everything", "cn_set" (needs d, r1, n).
  static TargetSet cn_set(int d, double r1, int n);
  static TargetSet everything();

  bool contains(const Point& y) const;
  // Lebesgue measure; throws ParamOutOfRange when not available.
  double volume() const;
  const Variant& variant() const { return v_; }

 private:
  explicit TargetSet(Variant v) : v_(std::move(v)) {}
  Variant v_;
};

// P_x(Y_tau in target), binomial standard error.
MCEstimate harmonic_measure(const ProcessParams& p, const DomainShape& domain, const Point& x,
                            const TargetSet& target, long n, const EstimatorConfig& cfg);

// Per-cell harmonic measure divided by cell volume.
std::vector<MCEstimate> exit_density_histogram(const ProcessParams& p, const DomainShape& domain, const Point& x,
                                               const std::vector<TargetSet>& partition, long n,
                                               const EstimatorConfig& cfg);
// Same estimates as masses (not divided by volume); usable without cell volumes.
std::vector<MCEstimate> exit_mass_histogram(const ProcessParams& p, const DomainShape& domain, const Point& x,
                                            const std::vector<TargetSet>& partition, long n,
                                            const EstimatorConfig& cfg);

struct GreenDensity {
  OccupationGrid grid;             // geometry
  std::vector<MCEstimate> cells;   // time / cell volume per cell
  MCEstimate exit_time;
};

GreenDensity green_density(const ProcessParams& p, const DomainShape& domain, const Point& x,
                           const OccupationGrid& grid, long n, const EstimatorConfig& cfg);

MCEstimate mean_exit_time(const ProcessParams& p, const DomainShape& domain, const Point& x, long n,
                          const EstimatorConfig& cfg);

// Rate at which the truncated process jumps from y into a fixed target T:
// kappa(y) = A int_{T, |z-y|<1} |y-z|^{-d-alpha} dz.
class JumpRateField {
 public:
  virtual ~JumpRateField() = default;
  virtual double rate(const Point& y) const = 0;
};

// Target = axis box in d = 2. Inner integral in closed form (incomplete beta),
// outer adaptive Gauss-Kronrod, clipped to |z - y| < 1.
class JumpRateBox2D : public JumpRateField {
 public:
  JumpRateBox2D(const ProcessParams& p, const Point& low, const Point& high, double rel_tol = 1e-9);
  double rate(const Point& y) const override;
  const Point& low() const { return low_; }
  const Point& high() const { return high_; }

 private:
  double inner(double b, double u0, double u1) const;
  ProcessParams p_;
  Point low_, high_;
  double A_, s_, rel_tol_;
};

// Target = polar cell {rho_lo <= |z-c| < rho_hi, th_lo <= arg(z-c) < th_hi} in d = 2.
// Polar quadrature around c; the angular range is clipped analytically to |z - y| < 1.
class JumpRatePolarCell2D : public JumpRateField {
 public:
  JumpRatePolarCell2D(const ProcessParams& p, const Point& center, double rho_lo, double rho_hi, double th_lo,
                      double th_hi, double rel_tol = 1e-9);
  double rate(const Point& y) const override;

 private:
  ProcessParams p_;
  Point c_;
  double rho_lo_, rho_hi_, th_lo_, th_hi_, A_, rel_tol_;
};

// Arbitrary rate function, e.g. an indicator to integrate occupation time.
class FunctionRate : public JumpRateField {
 public:
  explicit FunctionRate(std::function<double(const Point&)> f) : f_(std::move(f)) {}
  double rate(const Point& y) const override { return f_(y); }

 private:
  std::function<double(const Point&)> f_;
};

// Bilinear interpolation of another field on a regular grid over [low, high];
// exact evaluation outside the grid.
class GridJumpRate : public JumpRateField {
 public:
  GridJumpRate(std::shared_ptr<const JumpRateField> exact, const Point& low, const Point& high, int nx, int ny);
  double rate(const Point& y) const override;

 private:
  std::shared_ptr<const JumpRateField> exact_;
  Point low_, high_;
  int nx_, ny_;
  double hx_, hy_;
  std::vector<double> v_;
};

// Lévy-system estimator: P_x(Y_tau in T_j) = E_x sum kappa_j(Y) dt for targets at
// positive distance (more than epsilon) from the domain. Returns per-path moments
// of the k compensator integrals (k = fields.size()), optionally followed by the
// exit time and a hit indicator for each field's target.
struct CompensatorOptions {
  bool with_exit_time = false;
  std::vector<TargetSet> hit_targets;  // appended indicator columns
};

PathMoments compensator_moments(const ProcessParams& p, const DomainShape& domain, const Point& x,
                                const std::vector<const JumpRateField*>& fields, long n, const EstimatorConfig& cfg,
                                const CompensatorOptions& opt = {});

MCEstimate harmonic_measure_compensated(const ProcessParams& p, const DomainShape& domain, const Point& x,
                                        const JumpRateField& field, long n, const EstimatorConfig& cfg);

MCEstimate estimate_from(const PathMoments& m, int column, uint64_t seed);

struct HarnackResult {
  double ratio = 0.0, std_error = 0.0, M = 0.0;
  MCEstimate u1, u2;
};

// Paired (common random numbers) estimates of u(x1), u(x2) for u the harmonic
// measure of the target from B(x1,r) U B(x2,r). M = |x1-x2|/r must not exceed
// 1/r - 1/2 (CapViolated); r < r0 (RadiusTooLarge).
HarnackResult harnack_ratio_profile(const ProcessParams& p, const Point& x1, const Point& x2, double r,
                                    const TargetSet& far_target, long n, const EstimatorConfig& cfg);
HarnackResult harnack_ratio_profile(const ProcessParams& p, const Point& x1, const Point& x2, double r,
                                    const JumpRateField& far_target, long n, const EstimatorConfig& cfg);
// No cap or radius checks; used by the beyond-cap control.
HarnackResult harnack_values(const ProcessParams& p, const Point& x1, const Point& x2, double r,
                             const JumpRateField* field, const TargetSet* target, long n,
                             const EstimatorConfig& cfg);

}  // namespace tsp
