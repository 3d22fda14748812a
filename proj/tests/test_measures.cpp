#include <doctest.h>

#include <cmath>
#include <limits>

#include "swest/measures.hpp"
#include "swest/random.hpp"

using namespace swest;

namespace {

Eigen::MatrixXd mat(std::initializer_list<std::initializer_list<double>> rows) {
  Eigen::MatrixXd out(rows.size(), rows.begin()->size());
  Eigen::Index i = 0;
  for (const auto& row : rows) {
    Eigen::Index j = 0;
    for (double v : row) out(i, j++) = v;
    ++i;
  }
  return out;
}

}  // namespace

TEST_CASE("make_measure wraps points and validates") {
  const auto m = make_measure(mat({{0, 0}, {1, 1}}));
  CHECK(m.size() == 2);
  CHECK(m.dim() == 2);

  const auto single = make_measure(mat({{3}}));
  CHECK(single.size() == 1);
  CHECK(single.dim() == 1);

  Eigen::MatrixXd bad(1, 2);
  bad << 0.0, std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_WITH_AS(make_measure(bad), doctest::Contains("NonFiniteInput"), SwError);
  CHECK_THROWS_AS(make_measure(Eigen::MatrixXd(0, 2)), SwError);
}

TEST_CASE("project computes sorted inner products") {
  const auto m = make_measure(mat({{0, 0}, {1, 1}}));
  Eigen::VectorXd u(2);
  u << 1, 0;
  const auto s = project(m, u);
  CHECK(s.values() == std::vector<double>{0, 1});

  Eigen::VectorXd e2(2);
  e2 << 0, 1;
  CHECK(project(make_measure(mat({{1, 2}})), e2).values() == std::vector<double>{2});

  // Hand-computed inner products along the diagonal direction.
  Eigen::VectorXd diag(2);
  diag << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
  const auto tied = project(make_measure(mat({{1, 0}, {0, 1}})), diag);
  CHECK(tied.values()[0] == doctest::Approx(1 / std::sqrt(2.0)).epsilon(1e-15));
  CHECK(tied.values()[1] == doctest::Approx(1 / std::sqrt(2.0)).epsilon(1e-15));

  Eigen::VectorXd wrong(3);
  wrong << 1, 0, 0;
  CHECK_THROWS_AS(project(m, wrong), SwError);
}

TEST_CASE("quantile interpolates through order statistics") {
  CHECK(SortedSample1D({0, 10}).quantile(0.5) == doctest::Approx(5.0));
  CHECK(SortedSample1D({1, 2, 3}).quantile(1.0) == 3.0);
  // position 0.75 * 2 = 1.5, halfway between 1 and 4
  CHECK(SortedSample1D({0, 1, 4}).quantile(0.75) == doctest::Approx(2.5));
  CHECK(SortedSample1D({0, 10}).quantile(0.0) == 0.0);
  CHECK_THROWS_AS(SortedSample1D({0, 1}).quantile(1.5), SwError);
  CHECK_THROWS_AS(SortedSample1D({0, 1}).quantile(-0.1), SwError);
}

TEST_CASE("cdf inverts the quantile interpolation") {
  CHECK(SortedSample1D({0, 10}).cdf(5) == doctest::Approx(0.5));
  CHECK(SortedSample1D({0, 10}).cdf(-1) == 0.0);
  CHECK(SortedSample1D({0, 10}).cdf(11) == 1.0);
  CHECK(SortedSample1D({0, 1, 4}).cdf(2.5) == doctest::Approx(0.75));
}

TEST_CASE("degenerate single-point sample") {
  const SortedSample1D s({7.0});
  CHECK(s.quantile(0.0) == 7.0);
  CHECK(s.quantile(0.3) == 7.0);
  CHECK(s.quantile(1.0) == 7.0);
  CHECK(s.cdf(6.9) == 0.0);
  CHECK(s.cdf(7.0) == 0.5);
  CHECK(s.cdf(7.1) == 1.0);
}

TEST_CASE("ties give flat quantile segments and highest-t cdf") {
  const SortedSample1D s({1, 1, 2});
  CHECK(s.quantile(0.25) == 1.0);
  CHECK(s.quantile(0.5) == 1.0);
  CHECK(s.cdf(1.0) == doctest::Approx(0.5));  // highest knot mapped to the tied value
  CHECK(s.cdf(1.5) == doctest::Approx(0.75));
}

TEST_CASE("cdf(quantile(t)) round trip on strictly increasing samples") {
  RngStream rng(7, 0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> values(2 + static_cast<int>(rng.uniform01() * 40));
    double acc = rng.normal();
    for (auto& v : values) {
      acc += 0.1 + rng.uniform01();  // strictly increasing
      v = acc;
    }
    const SortedSample1D s(values);
    for (int i = 0; i <= 10; ++i) {
      const double t = i / 10.0;
      CHECK(s.cdf(s.quantile(t)) == doctest::Approx(t).epsilon(1e-12));
    }
  }
}

TEST_CASE("quantile is monotone in t") {
  RngStream rng(11, 0);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> values(16);
    for (auto& v : values) v = rng.normal();
    const SortedSample1D s(values);
    double prev = s.quantile(0.0);
    for (int i = 1; i <= 100; ++i) {
      const double cur = s.quantile(i / 100.0);
      CHECK(cur >= prev);
      prev = cur;
    }
  }
}

TEST_CASE("projection preserves size and is 1-Lipschitz") {
  RngStream rng(13, 0);
  for (int trial = 0; trial < 10; ++trial) {
    Eigen::MatrixXd points(8, 3);
    for (Eigen::Index i = 0; i < 8; ++i)
      for (Eigen::Index j = 0; j < 3; ++j) points(i, j) = rng.normal();
    const auto m = make_measure(points);
    const Eigen::VectorXd u = sample_sphere(3, rng);
    const auto s = project(m, u);
    CHECK(s.size() == m.size());
    for (Eigen::Index i = 0; i < m.size(); ++i)
      for (Eigen::Index j = i + 1; j < m.size(); ++j) {
        const double gap = std::abs(u.dot(points.row(i)) - u.dot(points.row(j)));
        CHECK(gap <= (points.row(i) - points.row(j)).norm() + 1e-12);
      }
  }
}
