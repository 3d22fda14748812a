#include "swest/measures.hpp"

#include <algorithm>
#include <cmath>

namespace swest {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonFiniteInput: return "NonFiniteInput";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::InvalidScale: return "InvalidScale";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::SizeMismatch: return "SizeMismatch";
    case ErrorCode::SizeCapExceeded: return "SizeCapExceeded";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::DegenerateSample: return "DegenerateSample";
    case ErrorCode::InsufficientPoints: return "InsufficientPoints";
    case ErrorCode::NonPositive: return "NonPositive";
    case ErrorCode::NonFiniteObjective: return "NonFiniteObjective";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
  }
  return "UnknownError";
}

EmpiricalMeasure::EmpiricalMeasure(Eigen::MatrixXd points) : points_(std::move(points)) {
  if (points_.rows() < 1) throw SwError(ErrorCode::EmptyInput, "measure needs at least one point");
  if (points_.cols() < 1) throw SwError(ErrorCode::EmptyInput, "measure needs at least one coordinate");
  if (!points_.allFinite()) throw SwError(ErrorCode::NonFiniteInput, "measure contains NaN or infinity");
}

EmpiricalMeasure make_measure(const Eigen::MatrixXd& points) { return EmpiricalMeasure(points); }

SortedSample1D::SortedSample1D(std::vector<double> values, bool presorted)
    : values_(std::move(values)) {
  if (values_.empty()) throw SwError(ErrorCode::EmptyInput, "empty 1D sample");
  for (double v : values_) {
    if (!std::isfinite(v)) throw SwError(ErrorCode::NonFiniteInput, "1D sample contains NaN or infinity");
  }
  if (!presorted) std::sort(values_.begin(), values_.end());
}

double SortedSample1D::quantile(double t) const {
  if (!(t >= 0.0 && t <= 1.0)) throw SwError(ErrorCode::OutOfRange, "quantile level outside [0,1]");
  const auto k = values_.size();
  if (k == 1) return values_[0];
  const double pos = t * static_cast<double>(k - 1);
  const auto lo = static_cast<std::size_t>(pos);
  if (lo >= k - 1) return values_[k - 1];
  const double frac = pos - static_cast<double>(lo);
  return values_[lo] + frac * (values_[lo + 1] - values_[lo]);
}

double SortedSample1D::cdf(double x) const {
  if (!std::isfinite(x)) throw SwError(ErrorCode::NonFiniteInput, "cdf argument not finite");
  const auto k = values_.size();
  if (k == 1) {
    if (x < values_[0]) return 0.0;
    if (x > values_[0]) return 1.0;
    return 0.5;
  }
  if (x < values_.front()) return 0.0;
  if (x >= values_.back()) return 1.0;
  // First index with value > x; values_[hi-1] is the last knot <= x, so tied
  // values resolve to the highest t mapped to them.
  const auto hi = static_cast<std::size_t>(
      std::upper_bound(values_.begin(), values_.end(), x) - values_.begin());
  const auto lo = hi - 1;
  double t = static_cast<double>(lo);
  if (values_[lo] < x) t += (x - values_[lo]) / (values_[hi] - values_[lo]);
  return t / static_cast<double>(k - 1);
}

SortedSample1D project(const EmpiricalMeasure& mu, const Eigen::VectorXd& u) {
  if (u.size() != mu.dim())
    throw SwError(ErrorCode::DimensionMismatch, "projection direction has wrong dimension");
  Eigen::VectorXd proj = mu.points() * u;
  std::vector<double> values(proj.data(), proj.data() + proj.size());
  return SortedSample1D(std::move(values));
}

ProjectionSet::ProjectionSet(Eigen::MatrixXd directions) : directions_(std::move(directions)) {
  if (directions_.rows() < 1) throw SwError(ErrorCode::EmptyInput, "projection set needs at least one direction");
  for (Eigen::Index l = 0; l < directions_.rows(); ++l) {
    const double norm = directions_.row(l).norm();
    if (std::abs(norm - 1.0) > 1e-12)
      throw SwError(ErrorCode::OutOfRange, "projection direction is not a unit vector");
  }
}

}  // namespace swest
