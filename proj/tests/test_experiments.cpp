#include <doctest.h>

#include <cmath>
#include <fstream>

#include "swest/experiments.hpp"

using namespace swest;

namespace {

// Fast settings for plumbing tests; statistical behavior is covered by the
// acceptance suite.
FitConfig quick_fit() {
  FitConfig fit;
  fit.adam.iters = 60;
  return fit;
}

bool same_except_wall_time(const ExperimentRecord& a, const ExperimentRecord& b) {
  return a.experiment == b.experiment && a.rep == b.rep && a.n == b.n && a.m == b.m &&
         a.d == b.d && a.method == b.method && a.mse == b.mse && a.seed == b.seed;
}

}  // namespace

TEST_CASE("kde: normal oracle, normalization, degenerate input") {
  RngStream rng(61, 0);
  std::vector<double> samples(100000);
  for (auto& s : samples) s = rng.normal();
  const auto estimate = kde(samples, 512);
  CHECK(estimate.bandwidth > 0.0);

  // Density at zero close to 1/sqrt(2 pi).
  double at_zero = 0.0;
  double best_gap = 1e18;
  for (std::size_t g = 0; g < estimate.grid.size(); ++g) {
    const double gap = std::abs(estimate.grid[g]);
    if (gap < best_gap) {
      best_gap = gap;
      at_zero = estimate.density[g];
    }
  }
  CHECK(at_zero == doctest::Approx(1.0 / std::sqrt(2.0 * 3.14159265358979323846)).epsilon(0.05));

  double integral = 0.0;
  for (std::size_t g = 1; g < estimate.grid.size(); ++g)
    integral += 0.5 * (estimate.density[g] + estimate.density[g - 1]) *
                (estimate.grid[g] - estimate.grid[g - 1]);
  CHECK(integral == doctest::Approx(1.0).epsilon(0.02));
  for (double d : estimate.density) CHECK(d >= 0.0);

  CHECK_THROWS_WITH_AS(kde({3.0, 3.0, 3.0}, 64), doctest::Contains("DegenerateSample"), SwError);
  CHECK_THROWS_AS(kde({1.0}, 64), SwError);
}

TEST_CASE("loglog_slope exact power laws and errors") {
  const std::vector<double> xs{10, 100, 1000, 10000};
  std::vector<double> inv(xs.size()), inv_sqrt(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    inv[i] = 3.0 / xs[i];
    inv_sqrt[i] = 0.5 / std::sqrt(xs[i]);
  }
  CHECK(loglog_slope(xs, inv).slope == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(loglog_slope(xs, inv).r2 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(loglog_slope(xs, inv_sqrt).slope == doctest::Approx(-0.5).epsilon(1e-12));

  RngStream rng(62, 0);
  std::vector<double> noisy(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i)
    noisy[i] = (2.0 / xs[i]) * (1.0 + 0.01 * (rng.uniform01() - 0.5));
  const double slope = loglog_slope(xs, noisy).slope;
  CHECK(slope >= -1.05);
  CHECK(slope <= -0.95);

  CHECK_THROWS_WITH_AS(loglog_slope({1, 2}, {1, 2}), doctest::Contains("InsufficientPoints"),
                       SwError);
  CHECK_THROWS_WITH_AS(loglog_slope({1, 2, 3}, {1, -2, 3}), doctest::Contains("NonPositive"),
                       SwError);
}

TEST_CASE("records CSV format is stable") {
  const ExperimentRecord record{"consistency", 3, 100, 50, 10, "mswe", 0.25, 1.5, 42};
  CHECK(records_to_csv({record}) ==
        "experiment,rep,n,m,d,method,mse,wall_time_s,seed\n"
        "consistency,3,100,50,10,mswe,0.25,1.5,42\n");
}

TEST_CASE("consistency runner: determinism, replay, thread independence") {
  ConsistencyConfig cfg;
  cfg.ns = {40, 80};
  cfg.reps = 2;
  cfg.d = 3;
  cfg.fit = quick_fit();

  RunContext ctx;
  ctx.master_seed = 777;
  const auto run_a = run_consistency_gaussian(cfg, ctx);
  const auto run_b = run_consistency_gaussian(cfg, ctx);
  REQUIRE(run_a.records.size() == 8);
  REQUIRE(run_b.records.size() == 8);
  for (std::size_t i = 0; i < run_a.records.size(); ++i)
    CHECK(same_except_wall_time(run_a.records[i], run_b.records[i]));

  RunContext threaded = ctx;
  threaded.threads = 4;
  const auto run_c = run_consistency_gaussian(cfg, threaded);
  REQUIRE(run_c.records.size() == 8);
  for (std::size_t i = 0; i < run_a.records.size(); ++i)
    CHECK(same_except_wall_time(run_a.records[i], run_c.records[i]));

  // A single record reproduces from its task index and stored seed.
  for (int task = 0; task < 4; ++task) {
    const auto replay = consistency_task(cfg, ctx.master_seed, task);
    for (std::size_t j = 0; j < replay.size(); ++j)
      CHECK(replay[j].mse == run_a.records[2 * task + j].mse);
  }

  // The MSE error trends down across a 2x range even at this tiny scale is
  // not guaranteed; just check fields are sane.
  for (const auto& record : run_a.records) {
    CHECK(record.mse >= 0.0);
    CHECK(record.wall_time_s > 0.0);
    CHECK(record.seed == 777);
  }
}

TEST_CASE("clt runner produces samples, kde files, and records") {
  CltConfig cfg;
  cfg.ns = {60, 120};
  cfg.reps = 4;
  cfg.d = 2;
  cfg.fit = quick_fit();
  cfg.fit.p = 1.0;

  RunContext ctx;
  ctx.master_seed = 888;
  const auto result = run_clt_gaussian(cfg, ctx);
  CHECK(result.output.records.size() == 8);
  REQUIRE(result.sigma2_by_n.size() == 2);
  CHECK(result.sigma2_by_n[0].size() == 4);
  CHECK(result.rescaled_by_n[1].size() == 4);
  for (std::size_t j = 0; j < 4; ++j)
    CHECK(result.rescaled_by_n[0][j] ==
          doctest::Approx(std::sqrt(60.0) * (result.sigma2_by_n[0][j] - 1.0)));
  CHECK(result.kde_by_n.size() == 2);
  CHECK(result.output.extra_files.size() == 4);  // samples + kde per n
}

TEST_CASE("meswe-vs-mswe runner on both models") {
  MesweToMsweConfig cfg;
  cfg.model = ModelSpec::Kind::Gaussian;
  cfg.n_fixed = 120;
  cfg.ms = {20, 120};
  cfg.reps = 2;
  cfg.d = 2;
  cfg.fit = quick_fit();

  RunContext ctx;
  ctx.master_seed = 999;
  const auto gaussian = run_meswe_to_mswe(cfg, ctx);
  CHECK(gaussian.records.size() == 4);
  for (const auto& record : gaussian.records) {
    CHECK(record.n == 120);
    CHECK((record.m == 20 || record.m == 120));
    CHECK(record.mse >= 0.0);
  }

  cfg.model = ModelSpec::Kind::EcsLocation;
  cfg.n_fixed = 50;
  cfg.m_reference = 200;
  const auto ecs = run_meswe_to_mswe(cfg, ctx);
  CHECK(ecs.records.size() == 4);
  CHECK(ecs.name == "meswe_vs_mswe_ecs");
}

TEST_CASE("timing runner produces three methods per cell") {
  TimingConfig cfg;
  cfg.ds = {2};
  cfg.reps = 1;
  cfg.n = 16;
  cfg.m = 16;
  cfg.nm.max_iters = 5;

  RunContext ctx;
  ctx.master_seed = 1234;
  const auto result = run_timing_comparison(cfg, ctx);
  REQUIRE(result.records.size() == 3);
  CHECK(result.records[0].method == "meswe");
  CHECK(result.records[1].method == "mewe_exact");
  CHECK(result.records[2].method == "mewe_sinkhorn");
  for (const auto& record : result.records) {
    CHECK(record.wall_time_s > 0.0);
    CHECK(std::isfinite(record.mse));
  }
}

TEST_CASE("experiment output writer round trip") {
  ExperimentOutput output;
  output.name = "writer_check";
  output.records.push_back({"writer_check", 0, 10, 0, 2, "mswe", 0.5, 0.1, 7});
  output.extra_files.emplace_back("extra.csv", "a,b\n1,2\n");

  const std::string dir = "/tmp/swest_writer_test";
  write_experiment_output(output, dir, "{\"reps\":1}", 7);

  std::ifstream csv(dir + "/writer_check.csv");
  REQUIRE(csv.good());
  std::string header;
  std::getline(csv, header);
  CHECK(header == "experiment,rep,n,m,d,method,mse,wall_time_s,seed");
  std::ifstream meta(dir + "/writer_check_meta.json");
  REQUIRE(meta.good());
  std::ifstream extra(dir + "/extra.csv");
  REQUIRE(extra.good());
}
