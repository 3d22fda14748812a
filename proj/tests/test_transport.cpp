#include <doctest.h>

#include "oracles.hpp"
#include "swest/experiments.hpp"
#include "swest/transport.hpp"

using namespace swest;

namespace {

EmpiricalMeasure random_measure(Eigen::Index n, Eigen::Index d, RngStream& rng, double spread = 1.0) {
  Eigen::MatrixXd points(n, d);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < d; ++j) points(i, j) = spread * rng.normal();
  return EmpiricalMeasure(std::move(points));
}

std::vector<double> random_sorted(Eigen::Index n, RngStream& rng, double shift = 0.0) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.normal() + shift;
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

TEST_CASE("w1d_exact on equal sizes matches the sorted pairing") {
  // Brute force over the two pairings of two points: min(1+1, 3+1)/2 = 1.
  const SortedSample1D a({0, 2}), b({1, 3});
  const double direct = std::min(std::abs(0 - 1) + std::abs(2 - 3), std::abs(0 - 3) + std::abs(2 - 1)) / 2.0;
  CHECK(w1d_exact(a, b, 1.0) == doctest::Approx(direct));
  CHECK(w1d_exact(a, b, 1.0) == doctest::Approx(1.0));

  const SortedSample1D c({5, 7, 9});
  for (double p : {1.0, 2.0, 3.5}) CHECK(w1d_exact(c, c, p) == 0.0);

  CHECK(w1d_exact(SortedSample1D({0}), SortedSample1D({3}), 2.0) == doctest::Approx(3.0));
}

TEST_CASE("w1d_exact unequal sizes integrates step quantiles exactly") {
  RngStream rng(21, 0);
  // Duplicating every atom leaves the measure unchanged.
  const auto base = random_sorted(9, rng);
  std::vector<double> doubled;
  for (double v : base) {
    doubled.push_back(v);
    doubled.push_back(v);
  }
  for (double p : {1.0, 2.0, 3.0})
    CHECK(w1d_exact(SortedSample1D(base), SortedSample1D(doubled), p) <= 1e-14);

  // Midpoint Riemann sum over a fine level grid as the independent oracle.
  for (double p : {1.0, 2.0, 3.0}) {
    const auto av = random_sorted(7, rng);
    const auto bv = random_sorted(12, rng, 0.5);
    const int fine = 200000;
    double riemann = 0.0;
    for (int k = 0; k < fine; ++k) {
      const double t = (k + 0.5) / fine;
      const double qa = av[std::min<std::size_t>(static_cast<std::size_t>(t * av.size()), av.size() - 1)];
      const double qb = bv[std::min<std::size_t>(static_cast<std::size_t>(t * bv.size()), bv.size() - 1)];
      riemann += std::pow(std::abs(qa - qb), p) / fine;
    }
    const double exact = w1d_exact_p_pow(SortedSample1D(av), SortedSample1D(bv), p);
    CHECK(exact == doctest::Approx(riemann).epsilon(1e-3));
  }
}

TEST_CASE("w1d_quantile_mc approximates the exact solver") {
  RngStream rng(22, 0);
  const SortedSample1D a(random_sorted(32, rng));
  RngStream mc(22, 1);
  CHECK(w1d_quantile_mc(a, a, 2.0, 500, mc) == 0.0);

  const SortedSample1D x({0.0}), y({-4.2});
  for (int k : {1, 7, 99}) CHECK(w1d_quantile_mc(x, y, 2.0, k, mc) == doctest::Approx(4.2));

  const SortedSample1D big_a(random_sorted(64, rng));
  const SortedSample1D big_b(random_sorted(64, rng, 2.0));
  const double exact = w1d_exact(big_a, big_b, 2.0);
  const double approx = w1d_quantile_mc(big_a, big_b, 2.0, 10000, mc);
  CHECK(approx == doctest::Approx(exact).epsilon(0.03));
}

TEST_CASE("w1d_quantile_mc error shrinks like K^{-1/2}") {
  RngStream rng(23, 0);
  const SortedSample1D a(random_sorted(64, rng));
  const SortedSample1D b(random_sorted(64, rng, 1.5));

  // K -> infinity limit of the estimator: the integral of the squared
  // interpolated quantile difference, piecewise quadratic between the shared
  // knots i/63, so per-segment Simpson is exact.
  double limit_pow = 0.0;
  auto delta = [&](double t) { return a.quantile(t) - b.quantile(t); };
  for (int k = 0; k < 63; ++k) {
    const double t0 = k / 63.0, t1 = (k + 1) / 63.0;
    const double d0 = delta(t0), dm = delta(0.5 * (t0 + t1)), d1 = delta(t1);
    limit_pow += (t1 - t0) / 6.0 * (d0 * d0 + 4.0 * dm * dm + d1 * d1);
  }
  const double limit = std::sqrt(limit_pow);
  // The interpolated limit tracks the step-quantile solver at this sample size.
  CHECK(limit == doctest::Approx(w1d_exact(a, b, 2.0)).epsilon(0.05));

  const std::vector<double> ks = {100, 1000, 10000, 100000};
  std::vector<double> mean_abs_err(ks.size(), 0.0);
  const int seeds = 100;
  for (int s = 0; s < seeds; ++s) {
    RngStream mc(23, 100 + s);
    for (std::size_t i = 0; i < ks.size(); ++i)
      mean_abs_err[i] +=
          std::abs(w1d_quantile_mc(a, b, 2.0, static_cast<int>(ks[i]), mc) - limit) / seeds;
  }
  const auto fit = loglog_slope(ks, mean_abs_err);
  CHECK(fit.slope <= -0.3);
  CHECK(fit.slope >= -0.7);
}

TEST_CASE("w1d_cdf_mc composition approximation") {
  RngStream rng(24, 0);
  // Point mass onto itself.
  auto delta_sampler = [](RngStream&) { return 0.0; };
  auto delta_cdf = [](double x) { return x < 0.0 ? 0.0 : 1.0; };
  CHECK(w1d_cdf_mc(delta_sampler, delta_cdf, SortedSample1D({0.0}), 2.0, 64, rng) == 0.0);

  // N(0,1) against a large empirical draw of itself stays small.
  auto normal_sampler = [](RngStream& r) { return r.normal(); };
  auto normal_cdf = [](double x) { return oracles::normal_cdf(x); };
  const SortedSample1D data(random_sorted(10000, rng));
  CHECK(w1d_cdf_mc(normal_sampler, normal_cdf, data, 2.0, 10000, rng) <= 0.1);

  // Against a singleton the value is the root mean square distance to c.
  const double c = 2.0;
  const double value =
      w1d_cdf_mc(normal_sampler, normal_cdf, SortedSample1D({c}), 2.0, 10000, rng);
  CHECK(value == doctest::Approx(std::sqrt(1.0 + c * c)).epsilon(0.05));
}

TEST_CASE("sw_distance collapses to w1d_exact in one dimension") {
  RngStream rng(25, 0);
  for (int trial = 0; trial < 10; ++trial) {
    const auto x = random_measure(12, 1, rng);
    const auto y = random_measure(9, 1, rng);
    Eigen::MatrixXd dir(1, 1);
    dir << (trial % 2 == 0 ? 1.0 : -1.0);
    const ProjectionSet proj{dir};
    for (double p : {1.0, 2.0, 3.0}) {
      const double sw = sw_distance(x, y, p, proj);
      const double w = w1d_exact(project(x, dir.row(0)), project(y, dir.row(0)), p);
      CHECK(sw == doctest::Approx(w).epsilon(1e-15));
    }
  }
}

TEST_CASE("sw_distance basics and domination") {
  RngStream rng(26, 0);
  const auto x = random_measure(8, 3, rng);
  const auto y = random_measure(8, 3, rng);
  const auto proj = sample_projection_set(3, 500, rng);
  CHECK(sw_distance(x, x, 2.0, proj) == 0.0);

  const double sw = sw_distance(x, y, 2.0, proj);
  const double exact = w_exact_assignment(x, y, 2.0);
  CHECK(sw <= exact + 1e-9);
  CHECK(sw >= 0.0);

  const auto z = random_measure(8, 4, rng);
  CHECK_THROWS_AS(sw_distance(x, z, 2.0, proj), SwError);
}

TEST_CASE("sw_distance metric axioms with shared projections") {
  RngStream rng(27, 0);
  const auto proj = sample_projection_set(3, 50, rng);
  for (int trial = 0; trial < 20; ++trial) {
    const auto x = random_measure(6, 3, rng);
    const auto y = random_measure(9, 3, rng);
    const auto z = random_measure(7, 3, rng);
    const double xy = sw_distance(x, y, 2.0, proj);
    const double yx = sw_distance(y, x, 2.0, proj);
    const double xz = sw_distance(x, z, 2.0, proj);
    const double yz = sw_distance(y, z, 2.0, proj);
    CHECK(std::abs(xy - yx) <= 1e-12);
    CHECK(xz <= xy + yz + 1e-9);
  }
}

TEST_CASE("order monotonicity with shared projections and samples") {
  RngStream rng(28, 0);
  const auto proj = sample_projection_set(4, 32, rng);
  for (int trial = 0; trial < 10; ++trial) {
    const auto x = random_measure(10, 4, rng);
    const auto y = random_measure(10, 4, rng);
    const double sw1 = sw_distance(x, y, 1.0, proj);
    const double sw2 = sw_distance(x, y, 2.0, proj);
    const double sw3 = sw_distance(x, y, 3.0, proj);
    CHECK(sw1 <= sw2 + 1e-12);
    CHECK(sw2 <= sw3 + 1e-12);
  }
}

TEST_CASE("1D Gaussian closed form emerges from large samples") {
  const double oracle = oracles::gaussian_w2_by_quadrature(0.0, 1.0, 2.0, 1.5);
  // Sanity: quadrature reproduces sqrt(dm^2 + dsd^2) here.
  CHECK(oracle == doctest::Approx(std::sqrt(4.0 + 0.25)).epsilon(1e-9));

  RngStream rng(29, 0);
  std::vector<double> a(100000), b(100000);
  for (auto& v : a) v = rng.normal();
  for (auto& v : b) v = 2.0 + 1.5 * rng.normal();
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double w = w1d_exact(SortedSample1D(std::move(a), true), SortedSample1D(std::move(b), true), 2.0);
  CHECK(w == doctest::Approx(oracle).epsilon(0.02));
}

TEST_CASE("expected_sw basics") {
  RngStream rng(30, 0);
  // Point-mass model equal to the data gives zero.
  Eigen::MatrixXd point(1, 2);
  point << 1.0, -1.0;
  const EmpiricalMeasure y(Eigen::MatrixXd(point.replicate(5, 1)));
  auto delta_sampler = [&](Eigen::Index n, RngStream&) {
    return EmpiricalMeasure(Eigen::MatrixXd(point.replicate(n, 1)));
  };
  SwConfig cfg;
  cfg.p = 2.0;
  cfg.projections = 4;
  CHECK(expected_sw(delta_sampler, y, cfg, 3, 5, rng) == 0.0);

  // R = 1 with a fixed projection set reduces to one sw_distance call.
  const auto data = random_measure(50, 2, rng);
  const auto proj = sample_projection_set(2, 8, rng);
  RngStream sampler_rng(30, 5);
  auto gaussian_sampler = [&](Eigen::Index n, RngStream& r) {
    return sample_gaussian(Eigen::VectorXd::Zero(2), 1.0, n, r);
  };
  RngStream run_a(31, 0), run_b(31, 0);
  const double via_expected =
      expected_sw(gaussian_sampler, data, cfg, 1, 64, run_a, proj);
  const auto z = gaussian_sampler(64, run_b);
  CHECK(via_expected == doctest::Approx(sw_distance(data, z, cfg.p, proj)).epsilon(1e-15));

  // Matching Gaussian model stays small for moderate sizes.
  RngStream big_rng(32, 0);
  const auto big_data = random_measure(1000, 2, big_rng);
  SwConfig big_cfg;
  big_cfg.p = 2.0;
  big_cfg.projections = 10;
  CHECK(expected_sw(gaussian_sampler, big_data, big_cfg, 10, 1000, big_rng) <= 0.2);
}

TEST_CASE("w_exact_assignment agrees with factorial brute force") {
  RngStream rng(33, 0);
  Eigen::MatrixXd xp(2, 1), yp(2, 1);
  xp << 0, 2;
  yp << 2, 0;
  for (double p : {1.0, 2.0, 3.0})
    CHECK(w_exact_assignment(EmpiricalMeasure(xp), EmpiricalMeasure(yp), p) == doctest::Approx(0.0));

  const auto single_x = random_measure(1, 3, rng);
  const auto single_y = random_measure(1, 3, rng);
  CHECK(w_exact_assignment(single_x, single_y, 2.0) ==
        doctest::Approx((single_x.points() - single_y.points()).norm()));

  for (int trial = 0; trial < 20; ++trial) {
    Eigen::MatrixXd a(5, 2), b(5, 2);
    for (Eigen::Index i = 0; i < 5; ++i)
      for (Eigen::Index j = 0; j < 2; ++j) {
        a(i, j) = std::floor(rng.uniform01() * 10);
        b(i, j) = std::floor(rng.uniform01() * 10);
      }
    const EmpiricalMeasure x(a), y(b);
    std::vector<std::vector<double>> cost(5, std::vector<double>(5));
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j) cost[i][j] = (a.row(i) - b.row(j)).norm();
    const double brute = oracles::brute_force_assignment(cost) / 5.0;
    CHECK(w_exact_assignment(x, y, 1.0) == doctest::Approx(brute).epsilon(1e-12));
  }

  const auto x6 = random_measure(6, 2, rng);
  const auto y5 = random_measure(5, 2, rng);
  CHECK_THROWS_WITH_AS(w_exact_assignment(x6, y5, 2.0), doctest::Contains("SizeMismatch"), SwError);
  const auto big_x = random_measure(9, 2, rng);
  const auto big_y = random_measure(9, 2, rng);
  CHECK_THROWS_WITH_AS(w_exact_assignment(big_x, big_y, 2.0, 8),
                       doctest::Contains("SizeCapExceeded"), SwError);
}

TEST_CASE("sinkhorn distance against the assignment oracle") {
  RngStream rng(34, 0);
  const auto x = random_measure(8, 2, rng);
  const auto y = random_measure(8, 2, rng);

  double max_cost = 0.0;
  for (Eigen::Index i = 0; i < 8; ++i)
    for (Eigen::Index j = 0; j < 8; ++j)
      max_cost = std::max(max_cost,
                          std::pow((x.points().row(i) - y.points().row(j)).norm(), 2.0));
  SinkhornConfig cfg;
  cfg.epsilon = 0.01 * max_cost;
  cfg.max_iter = 20000;
  cfg.tol = 1e-10;
  const double approx = sinkhorn_distance(x, y, 2.0, cfg);
  const double exact = w_exact_assignment(x, y, 2.0);
  CHECK(approx == doctest::Approx(exact).epsilon(0.05));

  // Near-zero self distance up to entropic bias.
  double diameter = 0.0;
  for (Eigen::Index i = 0; i < 8; ++i)
    for (Eigen::Index j = 0; j < 8; ++j)
      diameter = std::max(diameter, (x.points().row(i) - x.points().row(j)).norm());
  SinkhornConfig self_cfg;
  self_cfg.epsilon_rel = 0.01;
  self_cfg.max_iter = 20000;
  self_cfg.tol = 1e-10;
  CHECK(sinkhorn_distance(x, x, 2.0, self_cfg) <= 0.05 * diameter);

  // All-zero cost matrix.
  Eigen::MatrixXd same(4, 2);
  same.setConstant(1.5);
  CHECK(sinkhorn_distance(EmpiricalMeasure(same), EmpiricalMeasure(same), 2.0, cfg) == 0.0);

  SinkhornConfig strict;
  strict.max_iter = 1;
  strict.tol = 1e-14;
  CHECK_THROWS_WITH_AS(sinkhorn_distance(x, y, 2.0, strict), doctest::Contains("NoConvergence"),
                       SwError);
}
