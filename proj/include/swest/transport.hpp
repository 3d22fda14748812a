#pragma once

#include <functional>
#include <optional>

#include "swest/measures.hpp"
#include "swest/random.hpp"

namespace swest {

struct SwConfig {
  double p = 2.0;        // order, >= 1
  int projections = 1;   // L, Monte Carlo directions per evaluation
  int grid_size = 128;   // K, 1D Monte Carlo / grid size
  std::uint64_t seed = 0;

  void validate() const;
};

struct SinkhornConfig {
  double epsilon = 0.0;       // absolute regularization; 0 means epsilon_rel * mean(C)
  double epsilon_rel = 0.05;  // used when epsilon == 0
  int max_iter = 500;
  double tol = 1e-6;          // L1 marginal violation threshold

  void validate() const;
};

// Exact 1D Wasserstein distance of order p between two empirical samples.
// Equal sizes reduce to the sorted pairing; unequal sizes integrate the step
// quantile difference exactly over the merged breakpoint grid. Returns the
// order-p root; w1d_exact_p_pow returns the p-th power.
double w1d_exact(const SortedSample1D& a, const SortedSample1D& b, double p);
double w1d_exact_p_pow(const SortedSample1D& a, const SortedSample1D& b, double p);

// Monte Carlo quantile approximation: average of |Fa^{-1}(t_k) - Fb^{-1}(t_k)|^p
// over K uniform levels, with interpolated quantiles.
double w1d_quantile_mc(const SortedSample1D& a, const SortedSample1D& b, double p, int grid_size,
                       RngStream& rng);

// Monte Carlo CDF-composition approximation: average of
// |s_k - Fb^{-1}(F_mu(s_k))|^p over K draws s_k from mu, with F_mu supplied by
// the caller (analytic or empirical).
double w1d_cdf_mc(const std::function<double(RngStream&)>& mu_sampler,
                  const std::function<double(double)>& mu_cdf, const SortedSample1D& b, double p,
                  int grid_size, RngStream& rng);

// Sliced-Wasserstein Monte Carlo estimate over a fixed projection set:
// ((1/L) sum_l W_p^p(u_l # X, u_l # Y))^{1/p}. Deterministic given proj.
double sw_distance(const EmpiricalMeasure& x, const EmpiricalMeasure& y, double p,
                   const ProjectionSet& proj);
double sw_distance_p_pow(const EmpiricalMeasure& x, const EmpiricalMeasure& y, double p,
                         const ProjectionSet& proj);

using ModelSampler = std::function<EmpiricalMeasure(Eigen::Index n, RngStream& rng)>;

// Expected SW estimate: (1/R) sum_r sw_distance(Y, Z_r) with Z_r fresh model
// draws of size m. Projections are redrawn per replicate unless fixed_proj is
// supplied.
double expected_sw(const ModelSampler& model_sampler, const EmpiricalMeasure& y,
                   const SwConfig& cfg, int replicates, Eigen::Index m, RngStream& rng,
                   const std::optional<ProjectionSet>& fixed_proj = std::nullopt);

inline constexpr Eigen::Index kAssignmentSizeCap = 512;

// Exact Wasserstein distance between equal-size uniform empirical measures via
// an O(n^3) assignment solve on the cost matrix ||x_i - y_j||^p.
double w_exact_assignment(const EmpiricalMeasure& x, const EmpiricalMeasure& y, double p,
                          Eigen::Index size_cap = kAssignmentSizeCap);

// Entropy-regularized transport cost <P, C>^{1/p} with uniform marginals,
// log-domain updates, iterated until the L1 marginal violation drops below
// tol. Raw regularized cost, no debiasing.
double sinkhorn_distance(const EmpiricalMeasure& x, const EmpiricalMeasure& y, double p,
                         const SinkhornConfig& cfg);

}  // namespace swest
