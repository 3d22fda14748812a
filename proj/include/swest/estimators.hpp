#pragma once

#include <functional>
#include <string>

#include "swest/models.hpp"
#include "swest/transport.hpp"

namespace swest {

struct AdamConfig {
  double lr = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps_hat = 1e-8;
  int iters = 5000;

  void validate() const;
};

struct NelderMeadConfig {
  double reflection = 1.0;
  double expansion = 2.0;
  double contraction = 0.5;
  double shrink = 0.5;
  double simplex_scale = 1.0;  // multiplier on the default per-coordinate perturbation
  int max_iters = 2000;
  double f_tol = 1e-8;
  double x_tol = 1e-8;

  void validate() const;
};

struct EstimateResult {
  Eigen::VectorXd theta_hat;
  std::vector<double> objective_trace;
  long n_evals = 0;
  double wall_time_s = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
  bool converged = true;
  std::string failure;      // empty unless the run was aborted or flagged
  std::string config_json;  // resolved configuration snapshot
};

using ValueGradFn = std::function<double(const Eigen::VectorXd&, Eigen::VectorXd&)>;
using ValueFn = std::function<double(const Eigen::VectorXd&)>;

// Bias-corrected ADAM over a fixed iteration budget. A non-finite objective or
// gradient aborts the run, keeping the trace collected so far.
EstimateResult adam_minimize(const ValueGradFn& value_and_grad, const Eigen::VectorXd& theta0,
                             const AdamConfig& cfg);

// Standard reflect/expand/contract/shrink simplex iteration; stops when the
// simplex value spread falls below f_tol, the simplex diameter falls below
// x_tol, or max_iters is hit (best-so-far returned, flagged not converged).
EstimateResult nelder_mead_minimize(const ValueFn& value_fn, const Eigen::VectorXd& theta0,
                                    const NelderMeadConfig& cfg);

// Monte Carlo SW_p^p objective between the analytic Gaussian model and the
// empirical data measure (CDF-composition approximation). The model draws are
// reparametrized, s = <u,m> + sigma z with z a fixed base normal matrix, so
// for fixed (proj, z) the objective is a smooth function of theta and the
// analytic gradient below is its exact derivative.
class MsweGaussianObjective {
 public:
  MsweGaussianObjective(EmpiricalMeasure data, double p);

  double value(const GaussianParams& theta, const ProjectionSet& proj,
               const Eigen::MatrixXd& base_z) const;
  double value_and_grad(const GaussianParams& theta, const ProjectionSet& proj,
                        const Eigen::MatrixXd& base_z, Eigen::VectorXd& grad_m,
                        double& grad_sigma2) const;

  const EmpiricalMeasure& data() const { return data_; }

 private:
  EmpiricalMeasure data_;
  double p_;
};

// Quantile-grid SW_p^p objective between a reparametrized generated sample and
// the data (interpolated quantiles on both sides, evaluated at fixed levels
// t_levels, one row of K levels per projection).
class MesweQuantileObjective {
 public:
  MesweQuantileObjective(EmpiricalMeasure data, double p);

  double value(const ModelParams& theta, const ProjectionSet& proj,
               const Eigen::MatrixXd& t_levels, const BaseNoise& base) const;
  // grad_sigma2 is written only for the Gaussian model.
  double value_and_grad(const ModelParams& theta, const ProjectionSet& proj,
                        const Eigen::MatrixXd& t_levels, const BaseNoise& base,
                        Eigen::VectorXd& grad_m, double* grad_sigma2) const;

  const EmpiricalMeasure& data() const { return data_; }

 private:
  EmpiricalMeasure data_;
  double p_;
};

// Spec-level wrappers: the sampling state (directions and base draws) comes
// from rng, and the gradient entry points consume the same state as the value
// they differentiate.
double mswe_objective_gaussian(const GaussianParams& theta, const EmpiricalMeasure& data,
                               const ProjectionSet& proj, int grid_size, RngStream& rng);

struct MsweGaussianGrad {
  Eigen::VectorXd grad_m;
  double grad_sigma2 = 0.0;
};

MsweGaussianGrad grad_mswe_gaussian(const GaussianParams& theta, const EmpiricalMeasure& data,
                                    const ProjectionSet& proj, const Eigen::MatrixXd& base_z);

double meswe_objective(const ModelParams& theta, const EmpiricalMeasure& data, const SwConfig& cfg,
                       int replicates, Eigen::Index m, bool crn, RngStream& rng);

Eigen::VectorXd grad_meswe_location(const ModelParams& theta, const EmpiricalMeasure& data,
                                    const ProjectionSet& proj, const Eigen::MatrixXd& t_levels,
                                    const BaseNoise& base);

enum class Optimizer { Adam, NelderMead };

struct ModelSpec {
  enum class Kind { Gaussian, EcsLocation } kind = Kind::Gaussian;
  int d = 1;
  double alpha = 1.8;  // ECS tail index, fixed per model
};

struct FitConfig {
  Optimizer optimizer = Optimizer::Adam;
  double p = 2.0;
  int projections = 1;  // directions per iteration (ADAM) or per evaluation (NM)
  int grid_size = 128;  // K
  int replicates = 1;   // R, generated datasets per NM evaluation
  bool crn = true;      // fix base noise and levels for the whole run
  bool fixed_projections = false;  // also fix the directions (deterministic objective)
  AdamConfig adam;
  NelderMeadConfig nm;
};

// theta_hat packs [m..., sigma2] for the Gaussian model and [m...] for the ECS
// location model. sigma2 is optimized as log sigma2 internally.
EstimateResult fit_mswe_gaussian(const EmpiricalMeasure& data, const GaussianParams& theta0,
                                 const FitConfig& cfg, const RngStream& base_stream);

EstimateResult fit_meswe(const ModelSpec& spec, const ModelParams& theta0,
                         const EmpiricalMeasure& data, Eigen::Index m_gen, const FitConfig& cfg,
                         const RngStream& base_stream);

ModelParams unpack_theta(const ModelSpec& spec, const Eigen::VectorXd& theta_public);
Eigen::VectorXd pack_theta(const ModelParams& params);

// Data-driven starting point: column means and pooled variance for the
// Gaussian model, column medians for the heavy-tailed location model.
ModelParams default_theta0(const ModelSpec& spec, const EmpiricalMeasure& data);

}  // namespace swest
