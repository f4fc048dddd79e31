#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace tsp {

enum class ErrorCode {
  InvalidParams,
  DimensionMismatch,
  PointNotInterior,
  PointNotExterior,
  CoincidentPoints,
  QuadratureDidNotConverge,
  RadiusTooLarge,
  ParamOutOfRange,
  StepLimitExceeded,
  AllPathsCensored,
  CapViolated,
  NoBoundaryPoint,
  InsufficientHits,
  ConfigError,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

inline constexpr int kMaxDim = 8;

// Fixed-capacity point; the dimension travels with the value.
class Point {
 public:
  Point() = default;
  explicit Point(int dim);
  Point(std::initializer_list<double> coords);
  static Point zeros(int dim) { return Point(dim); }
  static Point from(std::span<const double> coords);
  static Point unit(int dim, int axis, double scale = 1.0);

  int dim() const { return dim_; }
  double operator[](int i) const { return c_[static_cast<size_t>(i)]; }
  double& operator[](int i) { return c_[static_cast<size_t>(i)]; }
  std::span<const double> coords() const { return {c_.data(), static_cast<size_t>(dim_)}; }
  std::vector<double> to_vector() const { return {c_.begin(), c_.begin() + dim_}; }

  Point& operator+=(const Point& o) {
    for (int i = 0; i < dim_; ++i) c_[i] += o.c_[i];
    return *this;
  }
  Point& operator-=(const Point& o) {
    for (int i = 0; i < dim_; ++i) c_[i] -= o.c_[i];
    return *this;
  }
  Point& operator*=(double s) {
    for (int i = 0; i < dim_; ++i) c_[i] *= s;
    return *this;
  }
  friend Point operator+(Point a, const Point& b) { return a += b; }
  friend Point operator-(Point a, const Point& b) { return a -= b; }
  friend Point operator*(Point a, double s) { return a *= s; }
  friend Point operator*(double s, Point a) { return a *= s; }
  friend bool operator==(const Point& a, const Point& b) {
    if (a.dim_ != b.dim_) return false;
    for (int i = 0; i < a.dim_; ++i)
      if (a.c_[i] != b.c_[i]) return false;
    return true;
  }

  double dot(const Point& o) const {
    double s = 0.0;
    for (int i = 0; i < dim_; ++i) s += c_[i] * o.c_[i];
    return s;
  }
  double norm2() const { return dot(*this); }
  double norm() const { return std::sqrt(norm2()); }
  bool is_finite() const;

 private:
  std::array<double, kMaxDim> c_{};
  int dim_ = 0;
};

inline double dist2(const Point& a, const Point& b) {
  double s = 0.0;
  for (int i = 0; i < a.dim(); ++i) {
    double t = a[i] - b[i];
    s += t * t;
  }
  return s;
}
inline double dist(const Point& a, const Point& b) { return std::sqrt(dist2(a, b)); }

void require_same_dim(const Point& p, int d, const char* what);

struct ProcessParams {
  int d = 2;
  double alpha = 1.0;

  // Throws InvalidParams when d < 2 or alpha outside (0,2).
  static ProcessParams make(int d, double alpha);
  void validate() const;
};

}  // namespace tsp
