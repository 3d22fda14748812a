#include "swest/random.hpp"

#include <Eigen/Cholesky>
#include <cmath>

namespace swest {

namespace {

constexpr double kPi = 3.14159265358979323846;

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline std::uint64_t mix64(std::uint64_t x) {
  std::uint64_t state = x;
  return splitmix64(state);
}

inline std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id) {
  std::uint64_t sm = seed ^ mix64(stream_id ^ 0xD1B54A32D192ED03ULL);
  for (auto& word : state_) word = splitmix64(sm);
}

std::uint64_t RngStream::next_u64() {
  // xoshiro256++
  const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

double RngStream::uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double RngStream::uniform_open01() {
  return (static_cast<double>(next_u64() >> 12) + 0.5) * 0x1.0p-52;
}

double RngStream::normal() {
  if (has_cached_normal_) {
    has_cached_normal_ = false;
    return cached_normal_;
  }
  const double u1 = uniform_open01();
  const double u2 = uniform01();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * kPi * u2;
  cached_normal_ = r * std::sin(angle);
  has_cached_normal_ = true;
  return r * std::cos(angle);
}

void StableParams::validate() const {
  if (!(alpha > 0.0 && alpha < 2.0)) throw SwError(ErrorCode::OutOfRange, "stable alpha must lie in (0,2)");
  if (!(beta >= -1.0 && beta <= 1.0)) throw SwError(ErrorCode::OutOfRange, "stable beta must lie in [-1,1]");
  if (!(gamma > 0.0)) throw SwError(ErrorCode::InvalidScale, "stable gamma must be positive");
  if (!std::isfinite(delta)) throw SwError(ErrorCode::NonFiniteInput, "stable delta must be finite");
}

void ECSParams::validate() const {
  if (!(alpha > 0.0 && alpha < 2.0)) throw SwError(ErrorCode::OutOfRange, "ECS alpha must lie in (0,2)");
  if (Sigma.rows() != Sigma.cols() || Sigma.rows() != m.size())
    throw SwError(ErrorCode::DimensionMismatch, "ECS Sigma and m dimensions disagree");
}

Eigen::VectorXd sample_sphere(int d, RngStream& rng) {
  if (d < 1) throw SwError(ErrorCode::OutOfRange, "sphere dimension must be >= 1");
  Eigen::VectorXd v(d);
  double norm = 0.0;
  do {
    for (int i = 0; i < d; ++i) v[i] = rng.normal();
    norm = v.norm();
  } while (norm == 0.0);
  return v / norm;
}

ProjectionSet sample_projection_set(int d, int count, RngStream& rng) {
  if (count < 1) throw SwError(ErrorCode::OutOfRange, "projection count must be >= 1");
  Eigen::MatrixXd directions(count, d);
  for (int l = 0; l < count; ++l) directions.row(l) = sample_sphere(d, rng).transpose();
  return ProjectionSet(std::move(directions));
}

EmpiricalMeasure sample_gaussian(const Eigen::VectorXd& m, double sigma2, Eigen::Index n,
                                 RngStream& rng) {
  if (!(sigma2 > 0.0)) throw SwError(ErrorCode::InvalidScale, "gaussian variance must be positive");
  if (n < 1) throw SwError(ErrorCode::EmptyInput, "sample size must be >= 1");
  const auto d = m.size();
  const double sigma = std::sqrt(sigma2);
  Eigen::MatrixXd points(n, d);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < d; ++j) points(i, j) = m[j] + sigma * rng.normal();
  return EmpiricalMeasure(std::move(points));
}

double sample_stable(const StableParams& params, RngStream& rng) {
  params.validate();
  const double alpha = params.alpha;
  const double beta = params.beta;
  const double v = kPi * (rng.uniform_open01() - 0.5);  // Uniform(-pi/2, pi/2)
  const double w = -std::log(rng.uniform_open01());     // Exp(1)

  if (alpha == 1.0) {
    const double half_pi = kPi / 2.0;
    const double z = (1.0 / half_pi) *
                     ((half_pi + beta * v) * std::tan(v) -
                      beta * std::log((half_pi * w * std::cos(v)) / (half_pi + beta * v)));
    // 1-parametrization picks up a gamma*log(gamma) drift at alpha = 1.
    return params.gamma * z + (2.0 / kPi) * beta * params.gamma * std::log(params.gamma) +
           params.delta;
  }

  const double tan_term = beta * std::tan(kPi * alpha / 2.0);
  const double b = std::atan(tan_term) / alpha;
  const double scale = std::pow(1.0 + tan_term * tan_term, 1.0 / (2.0 * alpha));
  const double z = scale * (std::sin(alpha * (v + b)) / std::pow(std::cos(v), 1.0 / alpha)) *
                   std::pow(std::cos(v - alpha * (v + b)) / w, (1.0 - alpha) / alpha);
  return params.gamma * z + params.delta;
}

double sample_positive_stable(double alpha_half, RngStream& rng) {
  if (!(alpha_half > 0.0 && alpha_half < 1.0))
    throw SwError(ErrorCode::OutOfRange, "alpha/2 must lie in (0,1)");
  const double alpha = 2.0 * alpha_half;
  const double gamma = 2.0 * std::pow(std::cos(kPi * alpha / 4.0), 2.0 / alpha);
  return sample_stable(StableParams{alpha_half, 1.0, gamma, 0.0}, rng);
}

EmpiricalMeasure sample_ecs(const ECSParams& params, Eigen::Index n, RngStream& rng) {
  params.validate();
  if (n < 1) throw SwError(ErrorCode::EmptyInput, "sample size must be >= 1");
  const auto d = params.m.size();
  Eigen::LLT<Eigen::MatrixXd> llt(params.Sigma);
  if (llt.info() != Eigen::Success)
    throw SwError(ErrorCode::NotPositiveDefinite, "ECS Sigma has no Cholesky factorization");
  const Eigen::MatrixXd chol = llt.matrixL();

  Eigen::MatrixXd points(n, d);
  Eigen::VectorXd g(d);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double a = sample_positive_stable(params.alpha / 2.0, rng);
    for (Eigen::Index j = 0; j < d; ++j) g[j] = rng.normal();
    points.row(i) = (params.m + std::sqrt(a) * (chol * g)).transpose();
  }
  return EmpiricalMeasure(std::move(points));
}

}  // namespace swest
