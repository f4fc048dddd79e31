#include "tsp/domains/domain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tsp {

double AxisBox::distance_to_closed(const Point& p) const {
  double s = 0.0;
  for (int i = 0; i < p.dim(); ++i) {
    double e = std::max({low[i] - p[i], 0.0, p[i] - high[i]});
    s += e * e;
  }
  return std::sqrt(s);
}

bool Intersection::contains(const Point& p) const { return ball.contains(p) && shape->contains_unchecked(p); }

double Intersection::boundary_distance(const Point& p) const {
  return std::min(ball.boundary_distance(p), shape->boundary_distance_unchecked(p));
}

namespace {

void check_positive(double r, const char* what) {
  if (!(r > 0.0) || !std::isfinite(r)) throw Error(ErrorCode::InvalidParams, std::string(what) + " must be positive");
}

void check_finite(const Point& p, const char* what) {
  if (!p.is_finite()) throw Error(ErrorCode::InvalidParams, std::string(what) + " has non-finite coordinates");
}

// Vertices of a bounded polytope by enumerating d-subsets of faces.
std::vector<Point> polytope_vertices(const Polytope& poly, int d) {
  std::vector<Point> out;
  const int m = static_cast<int>(poly.faces.size());
  std::vector<int> idx(d);
  for (int i = 0; i < d; ++i) idx[i] = i;
  if (m < d) return out;
  while (true) {
    // solve N v = b by Gaussian elimination with partial pivoting
    double A[kMaxDim][kMaxDim + 1];
    for (int r = 0; r < d; ++r) {
      for (int c = 0; c < d; ++c) A[r][c] = poly.faces[idx[r]].normal[c];
      A[r][d] = poly.faces[idx[r]].offset;
    }
    bool singular = false;
    for (int c = 0; c < d && !singular; ++c) {
      int piv = c;
      for (int r = c + 1; r < d; ++r)
        if (std::abs(A[r][c]) > std::abs(A[piv][c])) piv = r;
      if (std::abs(A[piv][c]) < 1e-12) {
        singular = true;
        break;
      }
      for (int k = 0; k <= d; ++k) std::swap(A[c][k], A[piv][k]);
      for (int r = 0; r < d; ++r) {
        if (r == c) continue;
        double f = A[r][c] / A[c][c];
        for (int k = c; k <= d; ++k) A[r][k] -= f * A[c][k];
      }
    }
    if (!singular) {
      Point v(d);
      for (int c = 0; c < d; ++c) v[c] = A[c][d] / A[c][c];
      bool feasible = true;
      for (const auto& f : poly.faces)
        if (f.normal.dot(v) > f.offset + 1e-9 * (1.0 + std::abs(f.offset))) feasible = false;
      if (feasible) out.push_back(v);
    }
    int k = d - 1;
    while (k >= 0 && idx[k] == m - d + k) --k;
    if (k < 0) break;
    ++idx[k];
    for (int j = k + 1; j < d; ++j) idx[j] = idx[j - 1] + 1;
  }
  return out;
}

BoundingBall ball_around(const std::vector<Point>& pts, int d) {
  Point c(d);
  for (const auto& p : pts) c += p;
  c *= 1.0 / pts.size();
  double r = 0.0;
  for (const auto& p : pts) r = std::max(r, dist(p, c));
  return {c, r};
}

}  // namespace

DomainShape DomainShape::ball(const Point& center, double radius) {
  check_finite(center, "ball center");
  check_positive(radius, "ball radius");
  return DomainShape(Ball{center, radius}, center.dim());
}

DomainShape DomainShape::annulus(const Point& center, double r_inner, double r_outer) {
  check_finite(center, "annulus center");
  if (!(r_inner >= 0.0) || !(r_outer > r_inner) || !std::isfinite(r_outer))
    throw Error(ErrorCode::InvalidParams, "annulus needs 0 <= r_inner < r_outer");
  return DomainShape(Annulus{center, r_inner, r_outer}, center.dim());
}

DomainShape DomainShape::box(const Point& low, const Point& high) {
  if (low.dim() != high.dim()) throw Error(ErrorCode::DimensionMismatch, "box corners differ in dimension");
  check_finite(low, "box corner");
  check_finite(high, "box corner");
  for (int i = 0; i < low.dim(); ++i)
    if (!(low[i] < high[i])) throw Error(ErrorCode::InvalidParams, "box needs low < high componentwise");
  return DomainShape(AxisBox{low, high}, low.dim());
}

DomainShape DomainShape::polytope(const std::vector<std::pair<Point, double>>& faces, const Point& interior) {
  const int d = interior.dim();
  check_finite(interior, "interior point");
  if (faces.empty()) throw Error(ErrorCode::InvalidParams, "polytope needs at least one face");
  Polytope poly;
  poly.interior = interior;
  for (const auto& [n, b] : faces) {
    require_same_dim(n, d, "face normal");
    const double len = n.norm();
    if (!(len > 0.0) || !std::isfinite(b)) throw Error(ErrorCode::InvalidParams, "degenerate face");
    poly.faces.push_back({n * (1.0 / len), b / len});
  }
  if (!poly.contains(interior))
    throw Error(ErrorCode::InvalidParams, "supplied interior point violates a face constraint");
  return DomainShape(std::move(poly), d);
}

DomainShape DomainShape::box_minus_slab(const AxisBox& box, const AxisBox& slab) {
  DomainShape b = DomainShape::box(box.low, box.high);
  if (slab.low.dim() != box.low.dim() || slab.high.dim() != box.low.dim())
    throw Error(ErrorCode::DimensionMismatch, "slab dimension differs from box");
  const int d = box.low.dim();
  for (int i = 0; i < d; ++i)
    if (!(slab.low[i] <= slab.high[i])) throw Error(ErrorCode::InvalidParams, "slab needs low <= high");
  if (!(slab.low[d - 1] > box.low[d - 1] && slab.high[d - 1] < box.high[d - 1]))
    throw Error(ErrorCode::InvalidParams, "slab must lie strictly inside the box in the last coordinate");
  return DomainShape(BoxMinusSlab{AxisBox{box.low, box.high}, slab}, d);
}

DomainShape DomainShape::intersect(const DomainShape& shape, const Point& center, double radius) {
  require_same_dim(center, shape.dim(), "ball center");
  check_positive(radius, "ball radius");
  return DomainShape(Intersection{std::make_shared<const DomainShape>(shape), Ball{center, radius}}, shape.dim());
}

DomainShape DomainShape::ball_union(const std::vector<Ball>& balls) {
  if (balls.empty()) throw Error(ErrorCode::InvalidParams, "union needs at least one ball");
  const int d = balls.front().center.dim();
  for (const auto& b : balls) {
    require_same_dim(b.center, d, "ball center");
    check_positive(b.radius, "ball radius");
  }
  return DomainShape(BallUnion{balls}, d);
}

const char* DomainShape::kind() const {
  static const char* names[] = {"ball", "annulus", "box", "polytope", "box_minus_slab", "intersect", "union"};
  return names[v_.index()];
}

bool DomainShape::contains(const Point& p) const {
  require_same_dim(p, dim_, "point");
  return contains_unchecked(p);
}

double DomainShape::boundary_distance(const Point& p) const {
  if (!contains(p)) throw Error(ErrorCode::PointNotInterior, "point is not inside the domain");
  return boundary_distance_unchecked(p);
}

BoundingBall DomainShape::bounding_ball() const {
  return std::visit(
      [&](const auto& s) -> BoundingBall {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Ball>) {
          return {s.center, s.radius};
        } else if constexpr (std::is_same_v<T, Annulus>) {
          return {s.center, s.r_outer};
        } else if constexpr (std::is_same_v<T, AxisBox>) {
          return {(s.low + s.high) * 0.5, 0.5 * dist(s.low, s.high)};
        } else if constexpr (std::is_same_v<T, Polytope>) {
          auto v = polytope_vertices(s, dim_);
          if (static_cast<int>(v.size()) < dim_ + 1)
            throw Error(ErrorCode::InvalidParams, "polytope appears unbounded");
          return ball_around(v, dim_);
        } else if constexpr (std::is_same_v<T, BoxMinusSlab>) {
          return {(s.box.low + s.box.high) * 0.5, 0.5 * dist(s.box.low, s.box.high)};
        } else if constexpr (std::is_same_v<T, Intersection>) {
          BoundingBall a = s.shape->bounding_ball();
          if (a.radius <= s.ball.radius) return a;
          return {s.ball.center, s.ball.radius};
        } else {
          Point c(dim_);
          for (const auto& b : s.balls) c += b.center;
          c *= 1.0 / s.balls.size();
          double r = 0.0;
          for (const auto& b : s.balls) r = std::max(r, dist(b.center, c) + b.radius);
          return {c, r};
        }
      },
      v_);
}

AxisBox DomainShape::bounding_box() const {
  auto from_ball = [&](const Point& c, double r) {
    AxisBox b{c, c};
    for (int i = 0; i < dim_; ++i) {
      b.low[i] -= r;
      b.high[i] += r;
    }
    return b;
  };
  return std::visit(
      [&](const auto& s) -> AxisBox {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, AxisBox>) {
          return s;
        } else if constexpr (std::is_same_v<T, BoxMinusSlab>) {
          return s.box;
        } else if constexpr (std::is_same_v<T, Polytope>) {
          auto v = polytope_vertices(s, dim_);
          if (static_cast<int>(v.size()) < dim_ + 1)
            throw Error(ErrorCode::InvalidParams, "polytope appears unbounded");
          AxisBox b{v[0], v[0]};
          for (const auto& p : v)
            for (int i = 0; i < dim_; ++i) {
              b.low[i] = std::min(b.low[i], p[i]);
              b.high[i] = std::max(b.high[i], p[i]);
            }
          return b;
        } else if constexpr (std::is_same_v<T, Intersection>) {
          AxisBox a = s.shape->bounding_box();
          AxisBox c = from_ball(s.ball.center, s.ball.radius);
          for (int i = 0; i < dim_; ++i) {
            a.low[i] = std::max(a.low[i], c.low[i]);
            a.high[i] = std::min(a.high[i], c.high[i]);
          }
          return a;
        } else if constexpr (std::is_same_v<T, BallUnion>) {
          AxisBox b = from_ball(s.balls[0].center, s.balls[0].radius);
          for (const auto& bl : s.balls) {
            AxisBox c = from_ball(bl.center, bl.radius);
            for (int i = 0; i < dim_; ++i) {
              b.low[i] = std::min(b.low[i], c.low[i]);
              b.high[i] = std::max(b.high[i], c.high[i]);
            }
          }
          return b;
        } else {
          BoundingBall bb = bounding_ball();
          return from_ball(bb.center, bb.radius);
        }
      },
      v_);
}

DomainShape DomainShape::scaled(double f) const {
  check_positive(f, "scale factor");
  return std::visit(
      [&](const auto& s) -> DomainShape {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Ball>) {
          return ball(s.center * f, s.radius * f);
        } else if constexpr (std::is_same_v<T, Annulus>) {
          return annulus(s.center * f, s.r_inner * f, s.r_outer * f);
        } else if constexpr (std::is_same_v<T, AxisBox>) {
          return box(s.low * f, s.high * f);
        } else if constexpr (std::is_same_v<T, Polytope>) {
          std::vector<std::pair<Point, double>> faces;
          for (const auto& h : s.faces) faces.emplace_back(h.normal, h.offset * f);
          return polytope(faces, s.interior * f);
        } else if constexpr (std::is_same_v<T, BoxMinusSlab>) {
          return box_minus_slab(AxisBox{s.box.low * f, s.box.high * f}, AxisBox{s.slab.low * f, s.slab.high * f});
        } else if constexpr (std::is_same_v<T, Intersection>) {
          return intersect(s.shape->scaled(f), s.ball.center * f, s.ball.radius * f);
        } else {
          std::vector<Ball> bs;
          for (const auto& b : s.balls) bs.push_back({b.center * f, b.radius * f});
          return ball_union(bs);
        }
      },
      v_);
}

bool contains(const DomainShape& shape, const Point& p) { return shape.contains(p); }
double boundary_distance(const DomainShape& shape, const Point& p) { return shape.boundary_distance(p); }
BoundingBall bounding_ball(const DomainShape& shape) { return shape.bounding_ball(); }

DomainShape counterexample_domain(int d) {
  if (d < 2 || d > kMaxDim) throw Error(ErrorCode::InvalidParams, "counterexample domain needs d >= 2");
  AxisBox box{Point(d), Point(d)}, slab{Point(d), Point(d)};
  for (int i = 0; i < d; ++i) {
    box.low[i] = -100.0;
    box.high[i] = 100.0;
    // the slab's lower ends in x~ coincide with the box face, so open vs closed there is moot
    slab.low[i] = -100.0;
    slab.high[i] = 50.0;
  }
  slab.low[d - 1] = -0.5;
  slab.high[d - 1] = 0.0;
  return DomainShape::box_minus_slab(box, slab);
}

namespace {
bool in_counterexample_domain(const Point& p) {
  const int d = p.dim();
  bool in_box = true, in_slab = true;
  for (int i = 0; i < d; ++i) {
    in_box = in_box && p[i] > -100.0 && p[i] < 100.0;
    if (i < d - 1)
      in_slab = in_slab && p[i] > -100.0 && p[i] <= 50.0;
    else
      in_slab = in_slab && p[i] >= -0.5 && p[i] <= 0.0;
  }
  return in_box && !in_slab;
}

double tilde_norm(const Point& p) {
  double s = 0.0;
  for (int i = 0; i < p.dim() - 1; ++i) s += p[i] * p[i];
  return std::sqrt(s);
}
}  // namespace

CnSet::CnSet(int d_, double r1_, int n_) : d(d_), r1(r1_), n(n_) {
  if (d < 2 || d > kMaxDim) throw Error(ErrorCode::ParamOutOfRange, "C_n needs d >= 2");
  if (!(r1 > 0.0 && r1 < 0.5)) throw Error(ErrorCode::ParamOutOfRange, "r1 must lie in (0, 1/2)");
  if (n < 1) throw Error(ErrorCode::ParamOutOfRange, "n must be >= 1");
}

double CnSet::top() const { return -1.0 + std::ldexp(r1 * r1, -n); }

bool CnSet::contains(const Point& p) const {
  require_same_dim(p, d, "point");
  return in_counterexample_domain(p) && tilde_norm(p) <= half_width() && p[d - 1] <= top();
}

double CnSet::distance(const Point& p) const {
  require_same_dim(p, d, "point");
  const double a = std::max(tilde_norm(p) - half_width(), 0.0);
  const double b = std::max({p[d - 1] - top(), -100.0 - p[d - 1], 0.0});
  return std::sqrt(a * a + b * b);
}

bool DnSet::contains(const Point& p) const {
  require_same_dim(p, cn.d, "point");
  return in_counterexample_domain(p) && p[cn.d - 1] > 0.0 && cn.distance(p) < 1.0;
}

}  // namespace tsp
