#include "swest/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

namespace swest {

namespace {

inline double pow_p(double x, double p) {
  if (p == 1.0) return x;
  if (p == 2.0) return x * x;
  return std::pow(x, p);
}

inline double root_p(double x, double p) {
  if (p == 1.0) return x;
  if (p == 2.0) return std::sqrt(x);
  return std::pow(x, 1.0 / p);
}

void check_order(double p) {
  if (!(p >= 1.0)) throw SwError(ErrorCode::OutOfRange, "order p must be >= 1");
}

Eigen::MatrixXd cost_matrix(const EmpiricalMeasure& x, const EmpiricalMeasure& y, double p) {
  const auto n = x.size();
  const auto m = y.size();
  Eigen::MatrixXd c(n, m);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < m; ++j)
      c(i, j) = pow_p((x.points().row(i) - y.points().row(j)).norm(), p);
  return c;
}

// Minimum-cost perfect matching on a square cost matrix (Jonker-Volgenant
// style shortest augmenting paths), O(n^3).
double assignment_cost(const Eigen::MatrixXd& cost) {
  const int n = static_cast<int>(cost.rows());
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, std::numeric_limits<double>::infinity());
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      int j1 = 0;
      double delta = std::numeric_limits<double>::infinity();
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  double total = 0.0;
  for (int j = 1; j <= n; ++j)
    if (p[j]) total += cost(p[j] - 1, j - 1);
  return total;
}

}  // namespace

void SwConfig::validate() const {
  check_order(p);
  if (projections < 1) throw SwError(ErrorCode::OutOfRange, "projection count must be >= 1");
  if (grid_size < 1) throw SwError(ErrorCode::OutOfRange, "grid size must be >= 1");
}

void SinkhornConfig::validate() const {
  if (epsilon < 0.0 || (epsilon == 0.0 && !(epsilon_rel > 0.0)))
    throw SwError(ErrorCode::InvalidScale, "sinkhorn regularization must be positive");
  if (max_iter < 1) throw SwError(ErrorCode::OutOfRange, "sinkhorn max_iter must be >= 1");
  if (!(tol > 0.0)) throw SwError(ErrorCode::OutOfRange, "sinkhorn tolerance must be positive");
}

double w1d_exact_p_pow(const SortedSample1D& a, const SortedSample1D& b, double p) {
  check_order(p);
  const auto& av = a.values();
  const auto& bv = b.values();
  const auto n = av.size();
  const auto m = bv.size();

  if (n == m) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += pow_p(std::abs(av[i] - bv[i]), p);
    return acc / static_cast<double>(n);
  }

  // Step inverse CDFs are constant between consecutive breakpoints i/n and
  // j/m, so the quantile integral is a finite sum, exact for every p.
  double acc = 0.0;
  std::size_t ia = 0, ib = 0;
  double t = 0.0;
  while (ia < n && ib < m) {
    const double ta = static_cast<double>(ia + 1) / static_cast<double>(n);
    const double tb = static_cast<double>(ib + 1) / static_cast<double>(m);
    const double next = std::min(ta, tb);
    acc += (next - t) * pow_p(std::abs(av[ia] - bv[ib]), p);
    t = next;
    if (ta <= next) ++ia;
    if (tb <= next) ++ib;
  }
  return acc;
}

double w1d_exact(const SortedSample1D& a, const SortedSample1D& b, double p) {
  return root_p(w1d_exact_p_pow(a, b, p), p);
}

double w1d_quantile_mc(const SortedSample1D& a, const SortedSample1D& b, double p, int grid_size,
                       RngStream& rng) {
  check_order(p);
  if (grid_size < 1) throw SwError(ErrorCode::OutOfRange, "grid size must be >= 1");
  double acc = 0.0;
  for (int k = 0; k < grid_size; ++k) {
    const double t = rng.uniform01();
    acc += pow_p(std::abs(a.quantile(t) - b.quantile(t)), p);
  }
  return root_p(acc / grid_size, p);
}

double w1d_cdf_mc(const std::function<double(RngStream&)>& mu_sampler,
                  const std::function<double(double)>& mu_cdf, const SortedSample1D& b, double p,
                  int grid_size, RngStream& rng) {
  check_order(p);
  if (grid_size < 1) throw SwError(ErrorCode::OutOfRange, "grid size must be >= 1");
  double acc = 0.0;
  for (int k = 0; k < grid_size; ++k) {
    const double s = mu_sampler(rng);
    acc += pow_p(std::abs(s - b.quantile(mu_cdf(s))), p);
  }
  return root_p(acc / grid_size, p);
}

double sw_distance_p_pow(const EmpiricalMeasure& x, const EmpiricalMeasure& y, double p,
                         const ProjectionSet& proj) {
  check_order(p);
  if (x.dim() != y.dim() || proj.dim() != x.dim())
    throw SwError(ErrorCode::DimensionMismatch, "measures and projections must share dimension");
  double acc = 0.0;
  for (Eigen::Index l = 0; l < proj.count(); ++l) {
    const Eigen::VectorXd u = proj.direction(l);
    acc += w1d_exact_p_pow(project(x, u), project(y, u), p);
  }
  return acc / static_cast<double>(proj.count());
}

double sw_distance(const EmpiricalMeasure& x, const EmpiricalMeasure& y, double p,
                   const ProjectionSet& proj) {
  return root_p(sw_distance_p_pow(x, y, p, proj), p);
}

double expected_sw(const ModelSampler& model_sampler, const EmpiricalMeasure& y,
                   const SwConfig& cfg, int replicates, Eigen::Index m, RngStream& rng,
                   const std::optional<ProjectionSet>& fixed_proj) {
  cfg.validate();
  if (replicates < 1) throw SwError(ErrorCode::OutOfRange, "replicate count must be >= 1");
  if (m < 1) throw SwError(ErrorCode::OutOfRange, "generated sample size must be >= 1");
  double acc = 0.0;
  for (int r = 0; r < replicates; ++r) {
    const EmpiricalMeasure z = model_sampler(m, rng);
    if (fixed_proj) {
      acc += sw_distance(y, z, cfg.p, *fixed_proj);
    } else {
      const ProjectionSet proj =
          sample_projection_set(static_cast<int>(y.dim()), cfg.projections, rng);
      acc += sw_distance(y, z, cfg.p, proj);
    }
  }
  return acc / replicates;
}

double w_exact_assignment(const EmpiricalMeasure& x, const EmpiricalMeasure& y, double p,
                          Eigen::Index size_cap) {
  check_order(p);
  if (x.dim() != y.dim())
    throw SwError(ErrorCode::DimensionMismatch, "measures must share dimension");
  if (x.size() != y.size())
    throw SwError(ErrorCode::SizeMismatch, "assignment solver needs equal sample sizes");
  if (x.size() > size_cap) {
    std::ostringstream msg;
    msg << "sample size " << x.size() << " exceeds assignment cap " << size_cap;
    throw SwError(ErrorCode::SizeCapExceeded, msg.str());
  }
  const double total = assignment_cost(cost_matrix(x, y, p));
  return root_p(total / static_cast<double>(x.size()), p);
}

double sinkhorn_distance(const EmpiricalMeasure& x, const EmpiricalMeasure& y, double p,
                         const SinkhornConfig& cfg) {
  check_order(p);
  cfg.validate();
  if (x.dim() != y.dim())
    throw SwError(ErrorCode::DimensionMismatch, "measures must share dimension");
  const auto n = x.size();
  const auto m = y.size();
  const Eigen::MatrixXd c = cost_matrix(x, y, p);
  if (c.maxCoeff() == 0.0) return 0.0;

  const double eps = cfg.epsilon > 0.0 ? cfg.epsilon : cfg.epsilon_rel * c.mean();
  const double log_a = -std::log(static_cast<double>(n));
  const double log_b = -std::log(static_cast<double>(m));

  Eigen::VectorXd f(n), g(m), f_next(n), buf(std::max(n, m));

  auto logsumexp = [](const auto& v) {
    const double vmax = v.maxCoeff();
    return vmax + std::log((v.array() - vmax).exp().sum());
  };

  for (Eigen::Index i = 0; i < n; ++i)
    f[i] = -eps * (logsumexp((-c.row(i).transpose() / eps).eval()) + log_b);

  // Each pass updates g from f (making column marginals exact), then derives
  // the next f; the gap between f and f_next measures the row-marginal L1
  // violation of the plan built from (f, g).
  double violation = std::numeric_limits<double>::infinity();
  for (int it = 0; it < cfg.max_iter; ++it) {
    for (Eigen::Index j = 0; j < m; ++j) {
      buf.head(n) = (f - c.col(j)) / eps;
      g[j] = -eps * (logsumexp(buf.head(n)) + log_a);
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      buf.head(m) = (g - c.row(i).transpose()) / eps;
      f_next[i] = -eps * (logsumexp(buf.head(m)) + log_b);
    }
    violation = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
      violation += std::abs(std::exp((f[i] - f_next[i]) / eps) - 1.0) / static_cast<double>(n);
    if (violation < cfg.tol) break;
    f = f_next;
  }
  if (!(violation < cfg.tol)) {
    std::ostringstream msg;
    msg << "marginal violation " << violation << " above tolerance " << cfg.tol << " after "
        << cfg.max_iter << " iterations";
    throw SwError(ErrorCode::NoConvergence, msg.str());
  }

  double cost = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < m; ++j)
      cost += std::exp((f[i] + g[j] - c(i, j)) / eps + log_a + log_b) * c(i, j);
  return root_p(cost, p);
}

}  // namespace swest
