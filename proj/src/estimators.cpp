#include "swest/estimators.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>

namespace swest {

namespace {

// Stream batch offsets within one fit, part of the documented seed layout.
constexpr std::uint64_t kBatchProjections = 0;
constexpr std::uint64_t kBatchBaseNoise = 1;
constexpr std::uint64_t kBatchLevels = 2;
constexpr std::uint64_t kBatchReplicates = 3;

inline double signed_power_derivative(double r, double p) {
  // d|r|^p/dr, taken as the a.e. derivative for p = 1.
  if (p == 2.0) return 2.0 * r;
  if (p == 1.0) return r > 0.0 ? 1.0 : (r < 0.0 ? -1.0 : 0.0);
  return p * std::pow(std::abs(r), p - 1.0) * (r > 0.0 ? 1.0 : -1.0);
}

inline double abs_power(double r, double p) {
  if (p == 2.0) return r * r;
  if (p == 1.0) return std::abs(r);
  return std::pow(std::abs(r), p);
}

Eigen::MatrixXd draw_normal_matrix(Eigen::Index rows, Eigen::Index cols, RngStream& rng) {
  Eigen::MatrixXd z(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) z(i, j) = rng.normal();
  return z;
}

Eigen::MatrixXd draw_uniform_matrix(Eigen::Index rows, Eigen::Index cols, RngStream& rng) {
  Eigen::MatrixXd t(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) t(i, j) = rng.uniform01();
  return t;
}

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

}  // namespace

void AdamConfig::validate() const {
  if (!(lr > 0.0)) throw SwError(ErrorCode::OutOfRange, "adam learning rate must be positive");
  if (!(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0))
    throw SwError(ErrorCode::OutOfRange, "adam betas must lie in [0,1)");
  if (iters < 1) throw SwError(ErrorCode::OutOfRange, "adam iteration budget must be >= 1");
}

void NelderMeadConfig::validate() const {
  if (!(reflection > 0.0 && expansion > 1.0 && contraction > 0.0 && contraction < 1.0 &&
        shrink > 0.0 && shrink < 1.0))
    throw SwError(ErrorCode::OutOfRange, "nelder-mead coefficients outside standard ranges");
  if (max_iters < 1) throw SwError(ErrorCode::OutOfRange, "nelder-mead max_iters must be >= 1");
}

EstimateResult adam_minimize(const ValueGradFn& value_and_grad, const Eigen::VectorXd& theta0,
                             const AdamConfig& cfg) {
  cfg.validate();
  Timer timer;
  EstimateResult result;
  result.objective_trace.reserve(cfg.iters);

  Eigen::VectorXd theta = theta0;
  Eigen::VectorXd grad(theta.size());
  Eigen::VectorXd m1 = Eigen::VectorXd::Zero(theta.size());
  Eigen::VectorXd m2 = Eigen::VectorXd::Zero(theta.size());

  for (int t = 1; t <= cfg.iters; ++t) {
    const double value = value_and_grad(theta, grad);
    ++result.n_evals;
    if (!std::isfinite(value) || !grad.allFinite()) {
      result.theta_hat = theta;
      result.converged = false;
      result.failure = "NonFiniteObjective";
      result.wall_time_s = timer.seconds();
      return result;
    }
    result.objective_trace.push_back(value);
    m1 = cfg.beta1 * m1 + (1.0 - cfg.beta1) * grad;
    m2 = cfg.beta2 * m2 + (1.0 - cfg.beta2) * grad.cwiseProduct(grad);
    const double c1 = 1.0 - std::pow(cfg.beta1, t);
    const double c2 = 1.0 - std::pow(cfg.beta2, t);
    theta -= (cfg.lr * (m1 / c1).array() / ((m2 / c2).array().sqrt() + cfg.eps_hat)).matrix();
  }
  result.theta_hat = theta;
  result.wall_time_s = timer.seconds();
  return result;
}

EstimateResult nelder_mead_minimize(const ValueFn& value_fn, const Eigen::VectorXd& theta0,
                                    const NelderMeadConfig& cfg) {
  cfg.validate();
  Timer timer;
  EstimateResult result;
  const auto d = theta0.size();

  std::vector<Eigen::VectorXd> simplex;
  simplex.reserve(d + 1);
  simplex.push_back(theta0);
  for (Eigen::Index i = 0; i < d; ++i) {
    Eigen::VectorXd vertex = theta0;
    vertex[i] += cfg.simplex_scale * std::max(0.05 * std::abs(theta0[i]), 0.1);
    simplex.push_back(vertex);
  }
  std::vector<double> fvals(d + 1);
  auto eval = [&](const Eigen::VectorXd& x) {
    ++result.n_evals;
    return value_fn(x);
  };
  for (Eigen::Index i = 0; i <= d; ++i) fvals[i] = eval(simplex[i]);

  std::vector<int> order(d + 1);
  Eigen::VectorXd centroid(d), reflected(d), candidate(d);

  bool converged = false;
  for (int iter = 0; iter < cfg.max_iters; ++iter) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return fvals[a] < fvals[b]; });
    const int best = order.front();
    const int worst = order.back();
    const int second_worst = order[d > 0 ? d - 1 : 0];
    result.objective_trace.push_back(fvals[best]);

    double diameter = 0.0;
    for (Eigen::Index i = 0; i <= d; ++i)
      diameter = std::max(diameter, (simplex[i] - simplex[best]).lpNorm<Eigen::Infinity>());
    // Both the value spread and the simplex size must collapse; the value
    // spread alone vanishes on any simplex symmetric around the optimum.
    if (fvals[worst] - fvals[best] <= cfg.f_tol && diameter <= cfg.x_tol) {
      converged = true;
      break;
    }

    centroid.setZero();
    for (Eigen::Index i = 0; i <= d; ++i)
      if (static_cast<int>(i) != worst) centroid += simplex[i];
    centroid /= static_cast<double>(d);

    reflected = centroid + cfg.reflection * (centroid - simplex[worst]);
    const double f_reflected = eval(reflected);
    if (f_reflected < fvals[best]) {
      candidate = centroid + cfg.expansion * (reflected - centroid);
      const double f_expanded = eval(candidate);
      if (f_expanded < f_reflected) {
        simplex[worst] = candidate;
        fvals[worst] = f_expanded;
      } else {
        simplex[worst] = reflected;
        fvals[worst] = f_reflected;
      }
    } else if (f_reflected < fvals[second_worst]) {
      simplex[worst] = reflected;
      fvals[worst] = f_reflected;
    } else {
      const bool outside = f_reflected < fvals[worst];
      if (outside)
        candidate = centroid + cfg.contraction * (reflected - centroid);
      else
        candidate = centroid - cfg.contraction * (centroid - simplex[worst]);
      const double f_contracted = eval(candidate);
      if (f_contracted < std::min(f_reflected, fvals[worst])) {
        simplex[worst] = candidate;
        fvals[worst] = f_contracted;
      } else {
        for (Eigen::Index i = 0; i <= d; ++i) {
          if (static_cast<int>(i) == best) continue;
          simplex[i] = simplex[best] + cfg.shrink * (simplex[i] - simplex[best]);
          fvals[i] = eval(simplex[i]);
        }
      }
    }
  }

  const auto best_it = std::min_element(fvals.begin(), fvals.end());
  result.theta_hat = simplex[best_it - fvals.begin()];
  result.converged = converged;
  if (!converged) result.failure = "MaxIterExceeded";
  result.wall_time_s = timer.seconds();
  return result;
}

MsweGaussianObjective::MsweGaussianObjective(EmpiricalMeasure data, double p)
    : data_(std::move(data)), p_(p) {
  if (!(p_ >= 1.0)) throw SwError(ErrorCode::OutOfRange, "order p must be >= 1");
}

double MsweGaussianObjective::value(const GaussianParams& theta, const ProjectionSet& proj,
                                    const Eigen::MatrixXd& base_z) const {
  Eigen::VectorXd unused_m;
  double unused_s2 = 0.0;
  return value_and_grad(theta, proj, base_z, unused_m, unused_s2);
}

double MsweGaussianObjective::value_and_grad(const GaussianParams& theta,
                                             const ProjectionSet& proj,
                                             const Eigen::MatrixXd& base_z,
                                             Eigen::VectorXd& grad_m, double& grad_sigma2) const {
  theta.validate();
  if (proj.dim() != data_.dim())
    throw SwError(ErrorCode::DimensionMismatch, "projection set does not match data dimension");
  if (base_z.rows() != proj.count())
    throw SwError(ErrorCode::ShapeMismatch, "base draws need one row per projection");

  const auto l_count = proj.count();
  const auto k_count = base_z.cols();
  const double sigma = std::sqrt(theta.sigma2);
  const double inv_lk = 1.0 / static_cast<double>(l_count * k_count);

  grad_m = Eigen::VectorXd::Zero(data_.dim());
  grad_sigma2 = 0.0;
  double value = 0.0;
  for (Eigen::Index l = 0; l < l_count; ++l) {
    const Eigen::VectorXd u = proj.direction(l);
    const SortedSample1D data_proj = project(data_, u);
    const double mean_u = u.dot(theta.m);
    double dir_weight = 0.0;
    for (Eigen::Index k = 0; k < k_count; ++k) {
      const double z = base_z(l, k);
      const double s = mean_u + sigma * z;
      // F_mu(s) for the projected model is the standard normal CDF of z.
      const double r = s - data_proj.quantile(standard_normal_cdf(z));
      value += abs_power(r, p_) * inv_lk;
      const double dr = signed_power_derivative(r, p_) * inv_lk;
      dir_weight += dr;
      grad_sigma2 += dr * z / (2.0 * sigma);
    }
    grad_m += dir_weight * u;
  }
  return value;
}

MesweQuantileObjective::MesweQuantileObjective(EmpiricalMeasure data, double p)
    : data_(std::move(data)), p_(p) {
  if (!(p_ >= 1.0)) throw SwError(ErrorCode::OutOfRange, "order p must be >= 1");
}

double MesweQuantileObjective::value(const ModelParams& theta, const ProjectionSet& proj,
                                     const Eigen::MatrixXd& t_levels, const BaseNoise& base) const {
  Eigen::VectorXd unused_m;
  return value_and_grad(theta, proj, t_levels, base, unused_m, nullptr);
}

double MesweQuantileObjective::value_and_grad(const ModelParams& theta, const ProjectionSet& proj,
                                              const Eigen::MatrixXd& t_levels,
                                              const BaseNoise& base, Eigen::VectorXd& grad_m,
                                              double* grad_sigma2) const {
  if (proj.dim() != data_.dim())
    throw SwError(ErrorCode::DimensionMismatch, "projection set does not match data dimension");
  if (base.rows.cols() != data_.dim())
    throw SwError(ErrorCode::ShapeMismatch, "base noise dimension does not match data");
  if (t_levels.rows() != proj.count())
    throw SwError(ErrorCode::ShapeMismatch, "levels need one row per projection");

  const bool is_gaussian = std::holds_alternative<GaussianParams>(theta);
  double sigma = 1.0;
  Eigen::VectorXd location;
  if (is_gaussian) {
    const auto& g = std::get<GaussianParams>(theta);
    g.validate();
    sigma = std::sqrt(g.sigma2);
    location = g.m;
  } else {
    const auto& e = std::get<ECSLocationParams>(theta);
    e.validate();
    location = e.m;
  }

  const auto l_count = proj.count();
  const auto k_count = t_levels.cols();
  const double inv_lk = 1.0 / static_cast<double>(l_count * k_count);

  grad_m = Eigen::VectorXd::Zero(data_.dim());
  if (grad_sigma2) *grad_sigma2 = 0.0;
  double value = 0.0;
  for (Eigen::Index l = 0; l < l_count; ++l) {
    const Eigen::VectorXd u = proj.direction(l);
    const SortedSample1D data_proj = project(data_, u);
    // The generated sample is location + scale * base, so its projected
    // quantile is <u, location> + scale * (base projection quantile); the
    // interpolation weights do not depend on theta.
    Eigen::VectorXd base_proj = base.rows * u;
    const SortedSample1D base_sorted(
        std::vector<double>(base_proj.data(), base_proj.data() + base_proj.size()));
    const double mean_u = u.dot(location);
    double dir_weight = 0.0;
    for (Eigen::Index k = 0; k < k_count; ++k) {
      const double t = t_levels(l, k);
      const double base_q = base_sorted.quantile(t);
      const double r = mean_u + sigma * base_q - data_proj.quantile(t);
      value += abs_power(r, p_) * inv_lk;
      const double dr = signed_power_derivative(r, p_) * inv_lk;
      dir_weight += dr;
      if (grad_sigma2) *grad_sigma2 += dr * base_q / (2.0 * sigma);
    }
    grad_m += dir_weight * u;
  }
  return value;
}

double mswe_objective_gaussian(const GaussianParams& theta, const EmpiricalMeasure& data,
                               const ProjectionSet& proj, int grid_size, RngStream& rng) {
  if (grid_size < 1) throw SwError(ErrorCode::OutOfRange, "grid size must be >= 1");
  const MsweGaussianObjective objective(data, 2.0);
  const Eigen::MatrixXd base_z = draw_normal_matrix(proj.count(), grid_size, rng);
  return objective.value(theta, proj, base_z);
}

MsweGaussianGrad grad_mswe_gaussian(const GaussianParams& theta, const EmpiricalMeasure& data,
                                    const ProjectionSet& proj, const Eigen::MatrixXd& base_z) {
  const MsweGaussianObjective objective(data, 2.0);
  MsweGaussianGrad grad;
  objective.value_and_grad(theta, proj, base_z, grad.grad_m, grad.grad_sigma2);
  return grad;
}

double meswe_objective(const ModelParams& theta, const EmpiricalMeasure& data, const SwConfig& cfg,
                       int replicates, Eigen::Index m, bool crn, RngStream& rng) {
  cfg.validate();
  if (replicates < 1) throw SwError(ErrorCode::OutOfRange, "replicate count must be >= 1");
  if (m < 1) throw SwError(ErrorCode::OutOfRange, "generated sample size must be >= 1");
  const auto d = model_dim(theta);
  if (d != data.dim())
    throw SwError(ErrorCode::DimensionMismatch, "model and data dimensions disagree");

  double acc = 0.0;
  for (int r = 0; r < replicates; ++r) {
    EmpiricalMeasure generated = [&] {
      if (crn) {
        // Substreams leave rng untouched, so repeated calls with the same
        // stream state reproduce the same value at any theta.
        RngStream noise = rng.substream(kBatchReplicates + 2 * r);
        return reparametrized_sample(theta, draw_base_noise(theta, m, noise));
      }
      return sample_model(theta, m, rng);
    }();
    const ProjectionSet proj = [&] {
      if (crn) {
        RngStream proj_rng = rng.substream(kBatchReplicates + 2 * r + 1);
        return sample_projection_set(static_cast<int>(d), cfg.projections, proj_rng);
      }
      return sample_projection_set(static_cast<int>(d), cfg.projections, rng);
    }();
    acc += sw_distance_p_pow(data, generated, cfg.p, proj);
  }
  return acc / replicates;
}

Eigen::VectorXd grad_meswe_location(const ModelParams& theta, const EmpiricalMeasure& data,
                                    const ProjectionSet& proj, const Eigen::MatrixXd& t_levels,
                                    const BaseNoise& base) {
  const MesweQuantileObjective objective(data, 2.0);
  Eigen::VectorXd grad_m;
  objective.value_and_grad(theta, proj, t_levels, base, grad_m, nullptr);
  return grad_m;
}

ModelParams unpack_theta(const ModelSpec& spec, const Eigen::VectorXd& theta_public) {
  if (spec.kind == ModelSpec::Kind::Gaussian) {
    if (theta_public.size() != spec.d + 1)
      throw SwError(ErrorCode::ShapeMismatch, "gaussian theta needs d+1 entries");
    return GaussianParams{theta_public.head(spec.d), theta_public[spec.d]};
  }
  if (theta_public.size() != spec.d)
    throw SwError(ErrorCode::ShapeMismatch, "location theta needs d entries");
  return ECSLocationParams{theta_public, spec.alpha};
}

Eigen::VectorXd pack_theta(const ModelParams& params) {
  if (const auto* g = std::get_if<GaussianParams>(&params)) {
    Eigen::VectorXd theta(g->m.size() + 1);
    theta.head(g->m.size()) = g->m;
    theta[g->m.size()] = g->sigma2;
    return theta;
  }
  return std::get<ECSLocationParams>(params).m;
}

ModelParams default_theta0(const ModelSpec& spec, const EmpiricalMeasure& data) {
  const auto d = data.dim();
  if (spec.kind == ModelSpec::Kind::Gaussian) {
    const Eigen::VectorXd mean = data.points().colwise().mean();
    double var = 0.0;
    for (Eigen::Index j = 0; j < d; ++j)
      var += (data.points().col(j).array() - mean[j]).square().sum();
    var /= static_cast<double>(std::max<Eigen::Index>(data.size() * d, 1));
    return GaussianParams{mean, std::max(var, 1e-6)};
  }
  Eigen::VectorXd medians(d);
  for (Eigen::Index j = 0; j < d; ++j) {
    std::vector<double> column(data.points().col(j).data(),
                               data.points().col(j).data() + data.size());
    medians[j] = SortedSample1D(std::move(column)).quantile(0.5);
  }
  return ECSLocationParams{medians, spec.alpha};
}

namespace {

std::string fit_config_json(const ModelSpec& spec, const FitConfig& cfg, Eigen::Index m_gen,
                            const RngStream& stream, const char* estimator) {
  std::ostringstream out;
  out << "{\"estimator\":\"" << estimator << "\",\"model\":\""
      << (spec.kind == ModelSpec::Kind::Gaussian ? "gaussian" : "ecs_location")
      << "\",\"d\":" << spec.d << ",\"alpha\":" << spec.alpha << ",\"p\":" << cfg.p
      << ",\"projections\":" << cfg.projections << ",\"grid_size\":" << cfg.grid_size
      << ",\"replicates\":" << cfg.replicates << ",\"crn\":" << (cfg.crn ? "true" : "false")
      << ",\"fixed_projections\":" << (cfg.fixed_projections ? "true" : "false")
      << ",\"m\":" << m_gen << ",\"optimizer\":\""
      << (cfg.optimizer == Optimizer::Adam ? "adam" : "nelder-mead") << "\",\"seed\":"
      << stream.seed() << ",\"stream_id\":" << stream.stream_id() << "}";
  return out.str();
}

// Internal optimizer coordinates: [m..., log sigma2] for the Gaussian model,
// [m...] for the location model.
Eigen::VectorXd to_internal(const ModelSpec& spec, const ModelParams& params) {
  Eigen::VectorXd theta = pack_theta(params);
  if (spec.kind == ModelSpec::Kind::Gaussian) theta[spec.d] = std::log(theta[spec.d]);
  return theta;
}

ModelParams from_internal(const ModelSpec& spec, const Eigen::VectorXd& internal) {
  Eigen::VectorXd pub = internal;
  if (spec.kind == ModelSpec::Kind::Gaussian) pub[spec.d] = std::exp(pub[spec.d]);
  return unpack_theta(spec, pub);
}

void finalize_result(EstimateResult& result, const ModelSpec& spec, const RngStream& stream,
                     const std::string& config_json) {
  result.theta_hat = pack_theta(from_internal(spec, result.theta_hat));
  result.seed = stream.seed();
  result.stream_id = stream.stream_id();
  result.config_json = config_json;
}

}  // namespace

EstimateResult fit_mswe_gaussian(const EmpiricalMeasure& data, const GaussianParams& theta0,
                                 const FitConfig& cfg, const RngStream& base_stream) {
  const ModelSpec spec{ModelSpec::Kind::Gaussian, static_cast<int>(data.dim()), 0.0};
  const MsweGaussianObjective objective(data, cfg.p);

  RngStream proj_rng = base_stream.substream(kBatchProjections);
  RngStream noise_rng = base_stream.substream(kBatchBaseNoise);
  std::optional<ProjectionSet> fixed_proj;
  if (cfg.fixed_projections)
    fixed_proj = sample_projection_set(spec.d, cfg.projections, proj_rng);
  std::optional<Eigen::MatrixXd> fixed_z;
  if (cfg.crn) fixed_z = draw_normal_matrix(cfg.projections, cfg.grid_size, noise_rng);

  auto current_state = [&](Eigen::MatrixXd& z, std::optional<ProjectionSet>& proj) {
    proj = fixed_proj ? *fixed_proj
                      : sample_projection_set(spec.d, cfg.projections, proj_rng);
    z = fixed_z ? *fixed_z : draw_normal_matrix(cfg.projections, cfg.grid_size, noise_rng);
  };

  EstimateResult result;
  if (cfg.optimizer == Optimizer::Adam) {
    auto value_and_grad = [&](const Eigen::VectorXd& internal, Eigen::VectorXd& grad) {
      const auto params = std::get<GaussianParams>(from_internal(spec, internal));
      Eigen::MatrixXd z;
      std::optional<ProjectionSet> proj;
      current_state(z, proj);
      Eigen::VectorXd grad_m;
      double grad_s2 = 0.0;
      const double value = objective.value_and_grad(params, *proj, z, grad_m, grad_s2);
      grad.resize(internal.size());
      grad.head(spec.d) = grad_m;
      grad[spec.d] = grad_s2 * params.sigma2;  // chain rule to log sigma2
      return value;
    };
    result = adam_minimize(value_and_grad, to_internal(spec, theta0), cfg.adam);
  } else {
    auto value_fn = [&](const Eigen::VectorXd& internal) {
      const auto params = std::get<GaussianParams>(from_internal(spec, internal));
      Eigen::MatrixXd z;
      std::optional<ProjectionSet> proj;
      if (cfg.crn && !cfg.fixed_projections) {
        // Deterministic objective for the simplex: CRN fixes the directions too.
        RngStream eval_proj = base_stream.substream(kBatchProjections);
        proj = sample_projection_set(spec.d, cfg.projections, eval_proj);
        z = *fixed_z;
      } else {
        current_state(z, proj);
      }
      return objective.value(params, *proj, z);
    };
    result = nelder_mead_minimize(value_fn, to_internal(spec, theta0), cfg.nm);
  }
  finalize_result(result, spec, base_stream, fit_config_json(spec, cfg, 0, base_stream, "mswe"));
  return result;
}

EstimateResult fit_meswe(const ModelSpec& spec, const ModelParams& theta0,
                         const EmpiricalMeasure& data, Eigen::Index m_gen, const FitConfig& cfg,
                         const RngStream& base_stream) {
  if (m_gen < 1) throw SwError(ErrorCode::OutOfRange, "generated sample size must be >= 1");
  const MesweQuantileObjective objective(data, cfg.p);

  RngStream proj_rng = base_stream.substream(kBatchProjections);
  RngStream noise_rng = base_stream.substream(kBatchBaseNoise);
  RngStream level_rng = base_stream.substream(kBatchLevels);

  std::optional<ProjectionSet> fixed_proj;
  if (cfg.fixed_projections)
    fixed_proj = sample_projection_set(spec.d, cfg.projections, proj_rng);
  std::optional<BaseNoise> fixed_base;
  std::optional<Eigen::MatrixXd> fixed_levels;
  if (cfg.crn && cfg.optimizer == Optimizer::Adam) {
    fixed_base = draw_base_noise(theta0, m_gen, noise_rng);
    fixed_levels = draw_uniform_matrix(cfg.projections, cfg.grid_size, level_rng);
  }

  EstimateResult result;
  if (cfg.optimizer == Optimizer::Adam) {
    auto value_and_grad = [&](const Eigen::VectorXd& internal, Eigen::VectorXd& grad) {
      const ModelParams params = from_internal(spec, internal);
      const ProjectionSet proj = fixed_proj
                                     ? *fixed_proj
                                     : sample_projection_set(spec.d, cfg.projections, proj_rng);
      std::optional<BaseNoise> fresh_base;
      if (!fixed_base) fresh_base = draw_base_noise(params, m_gen, noise_rng);
      const BaseNoise& base = fixed_base ? *fixed_base : *fresh_base;
      std::optional<Eigen::MatrixXd> fresh_levels;
      if (!fixed_levels)
        fresh_levels = draw_uniform_matrix(cfg.projections, cfg.grid_size, level_rng);
      const Eigen::MatrixXd& levels = fixed_levels ? *fixed_levels : *fresh_levels;
      Eigen::VectorXd grad_m;
      double grad_s2 = 0.0;
      const bool is_gaussian = spec.kind == ModelSpec::Kind::Gaussian;
      const double value = objective.value_and_grad(params, proj, levels, base, grad_m,
                                                    is_gaussian ? &grad_s2 : nullptr);
      grad.resize(internal.size());
      grad.head(spec.d) = grad_m;
      if (is_gaussian)
        grad[spec.d] = grad_s2 * std::get<GaussianParams>(params).sigma2;
      return value;
    };
    result = adam_minimize(value_and_grad, to_internal(spec, theta0), cfg.adam);
  } else {
    SwConfig sw_cfg;
    sw_cfg.p = cfg.p;
    sw_cfg.projections = cfg.projections;
    sw_cfg.grid_size = cfg.grid_size;
    RngStream eval_rng = base_stream.substream(kBatchReplicates);
    auto value_fn = [&](const Eigen::VectorXd& internal) {
      const ModelParams params = from_internal(spec, internal);
      if (cfg.crn) {
        RngStream crn_rng = base_stream.substream(kBatchReplicates);
        return meswe_objective(params, data, sw_cfg, cfg.replicates, m_gen, true, crn_rng);
      }
      return meswe_objective(params, data, sw_cfg, cfg.replicates, m_gen, false, eval_rng);
    };
    result = nelder_mead_minimize(value_fn, to_internal(spec, theta0), cfg.nm);
  }
  finalize_result(result, spec, base_stream,
                  fit_config_json(spec, cfg, m_gen, base_stream, "meswe"));
  return result;
}

}  // namespace swest
