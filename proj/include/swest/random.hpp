#pragma once

#include <cstdint>

#include "swest/measures.hpp"

namespace swest {

// Seed/stream layout contract used by the experiment runners: replication r,
// batch b maps to stream_id = r * kStreamsPerReplication + b. Identical
// (seed, stream_id) pairs yield bit-identical sequences on every platform and
// for every thread count.
inline constexpr std::uint64_t kStreamsPerReplication = std::uint64_t{1} << 20;

inline constexpr std::uint64_t stream_id_for(std::uint64_t replication, std::uint64_t batch) {
  return replication * kStreamsPerReplication + batch;
}

// Deterministic seeded stream: xoshiro256++ state derived from (seed,
// stream_id) through splitmix64. Uniform and normal variates are generated
// from the raw bits directly, never through std:: distributions, so output is
// platform-independent.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  std::uint64_t next_u64();
  double uniform01();       // [0, 1)
  double uniform_open01();  // (0, 1)
  double normal();          // standard normal, Box-Muller with cached spare

  // Derived stream for a sub-task; deterministic function of this stream's
  // identity, does not consume state.
  RngStream substream(std::uint64_t batch) const {
    return RngStream(seed_, stream_id_ + batch);
  }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t state_[4];
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

// One-dimensional stable law in the 1-parametrization S(alpha, beta, gamma,
// delta; 1), in which the scale-mixture identity used by the elliptical
// sampler holds exactly.
struct StableParams {
  double alpha;  // in (0, 2)
  double beta;   // in [-1, 1]
  double gamma;  // scale > 0
  double delta;  // shift

  void validate() const;
};

struct ECSParams {
  double alpha;           // in (0, 2)
  Eigen::MatrixXd Sigma;  // d x d symmetric positive definite
  Eigen::VectorXd m;      // location

  void validate() const;
};

// Uniform draw on the unit sphere S^{d-1}: normalized standard normal vector.
Eigen::VectorXd sample_sphere(int d, RngStream& rng);

ProjectionSet sample_projection_set(int d, int count, RngStream& rng);

// n i.i.d. draws from N(m, sigma2 * I).
EmpiricalMeasure sample_gaussian(const Eigen::VectorXd& m, double sigma2, Eigen::Index n,
                                 RngStream& rng);

// Chambers-Mallows-Stuck draw from S(alpha, beta, gamma, delta; 1), including
// the alpha = 1 log-form branch.
double sample_stable(const StableParams& params, RngStream& rng);

// Totally skewed positive (alpha/2)-stable mixing variable A with the scale
// gamma = 2 cos(pi alpha / 4)^{2/alpha}, so that sqrt(A) G + m has the
// elliptically contoured stable characteristic function.
double sample_positive_stable(double alpha_half, RngStream& rng);

// n i.i.d. draws of sqrt(A) G + m with G ~ N(0, Sigma).
EmpiricalMeasure sample_ecs(const ECSParams& params, Eigen::Index n, RngStream& rng);

}  // namespace swest
