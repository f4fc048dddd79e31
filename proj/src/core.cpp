#include "tsp/core.hpp"

#include <algorithm>

namespace tsp {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::PointNotInterior: return "PointNotInterior";
    case ErrorCode::PointNotExterior: return "PointNotExterior";
    case ErrorCode::CoincidentPoints: return "CoincidentPoints";
    case ErrorCode::QuadratureDidNotConverge: return "QuadratureDidNotConverge";
    case ErrorCode::RadiusTooLarge: return "RadiusTooLarge";
    case ErrorCode::ParamOutOfRange: return "ParamOutOfRange";
    case ErrorCode::StepLimitExceeded: return "StepLimitExceeded";
    case ErrorCode::AllPathsCensored: return "AllPathsCensored";
    case ErrorCode::CapViolated: return "CapViolated";
    case ErrorCode::NoBoundaryPoint: return "NoBoundaryPoint";
    case ErrorCode::InsufficientHits: return "InsufficientHits";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

Point::Point(int dim) : dim_(dim) {
  if (dim < 1 || dim > kMaxDim)
    throw Error(ErrorCode::DimensionMismatch, "dimension " + std::to_string(dim) + " unsupported");
}

Point::Point(std::initializer_list<double> coords) : Point(static_cast<int>(coords.size())) {
  std::copy(coords.begin(), coords.end(), c_.begin());
}

Point Point::from(std::span<const double> coords) {
  Point p(static_cast<int>(coords.size()));
  std::copy(coords.begin(), coords.end(), p.c_.begin());
  return p;
}

Point Point::unit(int dim, int axis, double scale) {
  Point p(dim);
  p[axis] = scale;
  return p;
}

bool Point::is_finite() const {
  for (int i = 0; i < dim_; ++i)
    if (!std::isfinite(c_[i])) return false;
  return true;
}

void require_same_dim(const Point& p, int d, const char* what) {
  if (p.dim() != d)
    throw Error(ErrorCode::DimensionMismatch, std::string(what) + " has dimension " +
                                                  std::to_string(p.dim()) + ", expected " +
                                                  std::to_string(d));
}

ProcessParams ProcessParams::make(int d, double alpha) {
  ProcessParams p{d, alpha};
  p.validate();
  return p;
}

void ProcessParams::validate() const {
  if (d < 2 || d > kMaxDim)
    throw Error(ErrorCode::InvalidParams, "d must be in [2, " + std::to_string(kMaxDim) + "]");
  if (!(alpha > 0.0 && alpha < 2.0))
    throw Error(ErrorCode::InvalidParams, "alpha must lie in (0,2)");
}

}  // namespace tsp
