#pragma once

#include <variant>

#include "swest/random.hpp"

namespace swest {

struct GaussianParams {
  Eigen::VectorXd m;
  double sigma2 = 1.0;

  void validate() const;
};

// Elliptically contoured stable location family with Sigma fixed to the
// identity and alpha fixed per model.
struct ECSLocationParams {
  Eigen::VectorXd m;
  double alpha = 1.8;

  void validate() const;
};

using ModelParams = std::variant<GaussianParams, ECSLocationParams>;

Eigen::Index model_dim(const ModelParams& params);

// CDF of the projection of N(m, sigma2 I) along the unit vector u, evaluated
// at t: a 1D normal with mean <u, m> and variance sigma2.
double gaussian_projected_cdf(const GaussianParams& params, const Eigen::VectorXd& u, double t);

double standard_normal_cdf(double z);
double standard_normal_pdf(double z);

EmpiricalMeasure sample_model(const ModelParams& params, Eigen::Index n, RngStream& rng);

// Base noise cached once per optimizer run (common random numbers). For the
// Gaussian model rows are standard normal vectors and the output is
// m + sigma * base; for the ECS model rows are sqrt(A) G draws and the output
// is base + m. Either way the generated sample is a deterministic function of
// theta given the base.
struct BaseNoise {
  Eigen::MatrixXd rows;
};

BaseNoise draw_base_noise(const ModelParams& params, Eigen::Index n, RngStream& rng);

EmpiricalMeasure reparametrized_sample(const ModelParams& params, const BaseNoise& base);

}  // namespace swest
