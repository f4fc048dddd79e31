#pragma once

#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "tsp/core.hpp"

namespace tsp {

class DomainShape;

struct Ball {
  Point center;
  double radius = 0.0;
  bool contains(const Point& p) const { return dist2(p, center) < radius * radius; }
  double boundary_distance(const Point& p) const { return radius - dist(p, center); }
};

// Open annulus r_inner < |p - center| < r_outer.
struct Annulus {
  Point center;
  double r_inner = 0.0, r_outer = 0.0;
  bool contains(const Point& p) const {
    const double q = dist2(p, center);
    return q > r_inner * r_inner && q < r_outer * r_outer;
  }
  double boundary_distance(const Point& p) const {
    const double q = dist(p, center);
    return std::min(q - r_inner, r_outer - q);
  }
};

struct AxisBox {
  Point low, high;
  bool contains(const Point& p) const {
    for (int i = 0; i < p.dim(); ++i)
      if (!(p[i] > low[i] && p[i] < high[i])) return false;
    return true;
  }
  double boundary_distance(const Point& p) const {
    double m = std::numeric_limits<double>::infinity();
    for (int i = 0; i < p.dim(); ++i) m = std::min(m, std::min(p[i] - low[i], high[i] - p[i]));
    return m;
  }
  // Euclidean distance from p to the closed box.
  double distance_to_closed(const Point& p) const;
  bool contains_closed(const Point& p) const {
    for (int i = 0; i < p.dim(); ++i)
      if (p[i] < low[i] || p[i] > high[i]) return false;
    return true;
  }
};

// {p : normal . p < offset}, normal of unit length.
struct Halfspace {
  Point normal;
  double offset = 0.0;
};

struct Polytope {
  std::vector<Halfspace> faces;
  Point interior;
  bool contains(const Point& p) const {
    for (const auto& f : faces)
      if (!(f.normal.dot(p) < f.offset)) return false;
    return true;
  }
  double boundary_distance(const Point& p) const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& f : faces) m = std::min(m, f.offset - f.normal.dot(p));
    return m;
  }
};

// Open box with a closed axis-aligned slab removed.
struct BoxMinusSlab {
  AxisBox box, slab;
  bool contains(const Point& p) const { return box.contains(p) && !slab.contains_closed(p); }
  double boundary_distance(const Point& p) const {
    return std::min(box.boundary_distance(p), slab.distance_to_closed(p));
  }
};

struct Intersection {
  std::shared_ptr<const DomainShape> shape;
  Ball ball;
  bool contains(const Point& p) const;
  double boundary_distance(const Point& p) const;
};

struct BallUnion {
  std::vector<Ball> balls;
  bool contains(const Point& p) const {
    for (const auto& b : balls)
      if (b.contains(p)) return true;
    return false;
  }
  // largest inscribed distance among balls containing p: a valid lower bound
  double boundary_distance(const Point& p) const {
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& b : balls) m = std::max(m, b.boundary_distance(p));
    return m;
  }
};

struct BoundingBall {
  Point center;
  double radius = 0.0;
};

// Open set in R^d. Immutable; copies share nested shapes.
class DomainShape {
 public:
  using Variant = std::variant<Ball, Annulus, AxisBox, Polytope, BoxMinusSlab, Intersection, BallUnion>;

  static DomainShape ball(const Point& center, double radius);
  static DomainShape annulus(const Point& center, double r_inner, double r_outer);
  static DomainShape box(const Point& low, const Point& high);
  // faces: (normal, offset) pairs meaning normal.p < offset; normals need not be unit.
  static DomainShape polytope(const std::vector<std::pair<Point, double>>& faces, const Point& interior);
  static DomainShape box_minus_slab(const AxisBox& box, const AxisBox& slab);
  static DomainShape intersect(const DomainShape& shape, const Point& center, double radius);
  static DomainShape ball_union(const std::vector<Ball>& balls);

  int dim() const { return dim_; }
  const Variant& variant() const { return v_; }
  const char* kind() const;

  bool contains(const Point& p) const;
  // Positive lower bound on dist(p, boundary); throws PointNotInterior outside.
  double boundary_distance(const Point& p) const;
  BoundingBall bounding_ball() const;
  AxisBox bounding_box() const;
  // Image under p -> s p.
  DomainShape scaled(double s) const;

  // Unchecked queries for inner loops.
  bool contains_unchecked(const Point& p) const {
    return std::visit([&](const auto& s) { return s.contains(p); }, v_);
  }
  double boundary_distance_unchecked(const Point& p) const {
    return std::visit([&](const auto& s) { return s.boundary_distance(p); }, v_);
  }

 private:
  DomainShape(Variant v, int dim) : v_(std::move(v)), dim_(dim) {}
  Variant v_;
  int dim_ = 0;
};

bool contains(const DomainShape& shape, const Point& p);
double boundary_distance(const DomainShape& shape, const Point& p);
BoundingBall bounding_ball(const DomainShape& shape);

// (-100,100)^d minus the closed slab (-100,50]^{d-1} x [-1/2, 0].
DomainShape counterexample_domain(int d);

// C_n = {x in D : |x~| <= r1/8, x_d <= -1 + 2^{-n} r1^2}.
struct CnSet {
  int d = 2;
  double r1 = 0.2;
  int n = 1;
  CnSet(int d, double r1, int n);
  double top() const;
  double half_width() const { return r1 / 8.0; }
  bool contains(const Point& p) const;
  // distance from p to the closure of C_n
  double distance(const Point& p) const;
};

// D_n = {y in D : y_d > 0, dist(y, C_n) < 1}.
struct DnSet {
  CnSet cn;
  DnSet(int d, double r1, int n) : cn(d, r1, n) {}
  bool contains(const Point& p) const;
};

}  // namespace tsp
