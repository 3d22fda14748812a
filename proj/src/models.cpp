#include "swest/models.hpp"

#include <cmath>

namespace swest {

void GaussianParams::validate() const {
  if (!(sigma2 > 0.0)) throw SwError(ErrorCode::InvalidScale, "gaussian variance must be positive");
  if (!m.allFinite()) throw SwError(ErrorCode::NonFiniteInput, "gaussian mean must be finite");
}

void ECSLocationParams::validate() const {
  if (!(alpha > 0.0 && alpha < 2.0)) throw SwError(ErrorCode::OutOfRange, "ECS alpha must lie in (0,2)");
  if (!m.allFinite()) throw SwError(ErrorCode::NonFiniteInput, "ECS location must be finite");
}

Eigen::Index model_dim(const ModelParams& params) {
  return std::visit([](const auto& p) { return p.m.size(); }, params);
}

double standard_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double standard_normal_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * 3.14159265358979323846);
}

double gaussian_projected_cdf(const GaussianParams& params, const Eigen::VectorXd& u, double t) {
  params.validate();
  if (u.size() != params.m.size())
    throw SwError(ErrorCode::DimensionMismatch, "projection direction has wrong dimension");
  const double mean = u.dot(params.m);
  const double sd = std::sqrt(params.sigma2) * u.norm();
  return standard_normal_cdf((t - mean) / sd);
}

EmpiricalMeasure sample_model(const ModelParams& params, Eigen::Index n, RngStream& rng) {
  return std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, GaussianParams>) {
          p.validate();
          return sample_gaussian(p.m, p.sigma2, n, rng);
        } else {
          p.validate();
          const auto d = p.m.size();
          return sample_ecs(
              ECSParams{p.alpha, Eigen::MatrixXd::Identity(d, d), p.m}, n, rng);
        }
      },
      params);
}

BaseNoise draw_base_noise(const ModelParams& params, Eigen::Index n, RngStream& rng) {
  if (n < 1) throw SwError(ErrorCode::EmptyInput, "base noise needs at least one row");
  return std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        const auto d = p.m.size();
        Eigen::MatrixXd rows(n, d);
        if constexpr (std::is_same_v<T, GaussianParams>) {
          for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < d; ++j) rows(i, j) = rng.normal();
        } else {
          for (Eigen::Index i = 0; i < n; ++i) {
            const double a = sample_positive_stable(p.alpha / 2.0, rng);
            const double root_a = std::sqrt(a);
            for (Eigen::Index j = 0; j < d; ++j) rows(i, j) = root_a * rng.normal();
          }
        }
        return BaseNoise{std::move(rows)};
      },
      params);
}

EmpiricalMeasure reparametrized_sample(const ModelParams& params, const BaseNoise& base) {
  return std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        p.validate();
        if (base.rows.cols() != p.m.size())
          throw SwError(ErrorCode::ShapeMismatch, "base noise dimension does not match model");
        Eigen::MatrixXd points = base.rows;
        if constexpr (std::is_same_v<T, GaussianParams>) points *= std::sqrt(p.sigma2);
        points.rowwise() += p.m.transpose();
        return EmpiricalMeasure(std::move(points));
      },
      params);
}

}  // namespace swest
