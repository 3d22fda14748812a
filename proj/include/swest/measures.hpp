#pragma once

#include <Eigen/Dense>
#include <vector>

#include "swest/error.hpp"

namespace swest {

// Uniformly weighted empirical measure: one sample per row, immutable after
// construction.
class EmpiricalMeasure {
 public:
  explicit EmpiricalMeasure(Eigen::MatrixXd points);

  const Eigen::MatrixXd& points() const { return points_; }
  Eigen::Index size() const { return points_.rows(); }
  Eigen::Index dim() const { return points_.cols(); }

 private:
  Eigen::MatrixXd points_;
};

// Sorted one-dimensional sample with interpolated CDF/quantile evaluation.
// Quantile knots sit at t_i = i/(k-1) through the order statistics, so
// quantile(0) and quantile(1) are the sample min and max.
class SortedSample1D {
 public:
  explicit SortedSample1D(std::vector<double> values, bool presorted = false);

  const std::vector<double>& values() const { return values_; }
  Eigen::Index size() const { return static_cast<Eigen::Index>(values_.size()); }

  // Piecewise-linear interpolation through the order statistics; monotone in t.
  double quantile(double t) const;

  // Functional inverse of quantile(), clamped to [0,1] outside the range.
  // Across ties, returns the highest t mapped to that value.
  double cdf(double x) const;

 private:
  std::vector<double> values_;
};

// L unit directions on the sphere, one per row.
class ProjectionSet {
 public:
  explicit ProjectionSet(Eigen::MatrixXd directions);

  const Eigen::MatrixXd& directions() const { return directions_; }
  Eigen::Index count() const { return directions_.rows(); }
  Eigen::Index dim() const { return directions_.cols(); }
  Eigen::VectorXd direction(Eigen::Index l) const { return directions_.row(l); }

 private:
  Eigen::MatrixXd directions_;
};

EmpiricalMeasure make_measure(const Eigen::MatrixXd& points);

// Push-forward of mu along u: sorted vector of inner products <u, x_i>.
SortedSample1D project(const EmpiricalMeasure& mu, const Eigen::VectorXd& u);

}  // namespace swest
