#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <utility>

#include "swest/estimators.hpp"

namespace swest {

struct ExperimentRecord {
  std::string experiment;
  int rep = 0;
  std::int64_t n = 0;
  std::int64_t m = 0;
  int d = 0;
  std::string method;
  double mse = 0.0;
  double wall_time_s = 0.0;
  std::uint64_t seed = 0;
};

struct KdeEstimate {
  std::vector<double> grid;
  std::vector<double> density;
  double bandwidth = 0.0;
};

// Gaussian kernel density estimate, Silverman bandwidth
// h = 0.9 min(sd, IQR/1.34) k^{-1/5}, grid spanning mean +- 4 sd.
KdeEstimate kde(const std::vector<double>& samples, int grid_size = 256);

struct LogLogFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

// Ordinary least squares on (log x, log y); inputs must be positive.
LogLogFit loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys);

struct RunContext {
  std::uint64_t master_seed = 20250810;
  int threads = 1;
  const std::atomic<bool>* interrupt = nullptr;                // polled between tasks
  std::function<void(const std::string&)> progress;            // optional, one line per task
};

struct ExperimentOutput {
  std::string name;
  std::vector<ExperimentRecord> records;  // canonical order, independent of scheduling
  std::vector<std::pair<std::string, std::string>> extra_files;  // filename -> content
  bool interrupted = false;
  std::string failure;  // first task error, if any; completed records are kept
};

// Records CSV (schema: experiment,rep,n,m,d,method,mse,wall_time_s,seed), the
// JSON metadata sidecar, and any extra files, written under out_dir.
void write_experiment_output(const ExperimentOutput& output, const std::string& out_dir,
                             const std::string& resolved_config_json, std::uint64_t master_seed);

std::string records_to_csv(const std::vector<ExperimentRecord>& records);

// ---------------------------------------------------------------------------
// Gaussian consistency study: for each n and replication, fit MSWE and
// MESWE(m = n) on fresh N(0, I_d) data and record the mean squared error of
// the concatenated parameter vector against (0, 1).
struct ConsistencyConfig {
  std::vector<std::int64_t> ns{10, 32, 100, 316, 1000, 3162, 10000};
  int reps = 100;
  int d = 10;
  FitConfig fit;  // Adam, p = 2, one projection per iteration

  ConsistencyConfig() {
    fit.p = 2.0;
    fit.projections = 1;
  }
};

ExperimentOutput run_consistency_gaussian(const ConsistencyConfig& cfg, const RunContext& ctx);
// Task index maps to (n index, rep) as task = n_index * reps + rep; exposed so
// a single record can be reproduced from its seed.
std::vector<ExperimentRecord> consistency_task(const ConsistencyConfig& cfg,
                                               std::uint64_t master_seed, int task_index);

// ---------------------------------------------------------------------------
// CLT scaling study: repeated order-1 MSWE fits; outputs the rescaled samples
// sqrt(n) (sigma2_hat - 1) and a kernel density estimate per n.
struct CltConfig {
  std::vector<std::int64_t> ns{100, 1000, 10000};
  int reps = 500;
  int d = 10;
  int kde_grid = 256;
  FitConfig fit;

  CltConfig() {
    fit.p = 1.0;
    fit.projections = 1;
  }
};

struct CltOutput {
  ExperimentOutput output;
  std::vector<std::vector<double>> sigma2_by_n;
  std::vector<std::vector<double>> rescaled_by_n;
  std::vector<KdeEstimate> kde_by_n;
};

CltOutput run_clt_gaussian(const CltConfig& cfg, const RunContext& ctx);

// ---------------------------------------------------------------------------
// MESWE -> MSWE study on a fixed observed dataset: error between MESWE(m) and
// a per-replication reference (MSWE for the Gaussian model; MESWE at
// m_reference for the stable model, whose MSWE has no tractable density).
struct MesweToMsweConfig {
  ModelSpec::Kind model = ModelSpec::Kind::Gaussian;
  std::int64_t n_fixed = 2000;  // paper uses 100 for the stable model
  std::vector<std::int64_t> ms{10, 100, 1000, 10000};
  int reps = 100;
  int d = 10;
  double alpha = 1.8;
  double location_star = 2.0;   // stable model data location per coordinate
  std::int64_t m_reference = 10000;
  FitConfig fit;

  MesweToMsweConfig() {
    fit.p = 2.0;
    fit.projections = 1;
  }
};

ExperimentOutput run_meswe_to_mswe(const MesweToMsweConfig& cfg, const RunContext& ctx);
std::vector<ExperimentRecord> meswe_to_mswe_task(const MesweToMsweConfig& cfg,
                                                 std::uint64_t master_seed, int task_index);

// ---------------------------------------------------------------------------
// Timing comparison on the stable location model: MESWE vs exact-assignment
// and Sinkhorn Wasserstein estimators, all under the same Nelder-Mead budget.
struct TimingConfig {
  std::vector<int> ds{2, 5, 10};
  std::int64_t n = 200;
  std::int64_t m = 200;
  int reps = 100;
  double alpha = 1.8;
  double location_star = 2.0;
  double p = 1.0;  // finite first moment for alpha = 1.8
  int projections = 10;  // L for MESWE
  int replicates = 10;   // generated datasets per evaluation, all methods
  NelderMeadConfig nm;
  SinkhornConfig sinkhorn;

  TimingConfig() {
    // Same simplex budget for all three methods; the objectives are noisy, so
    // the budget, not the tolerances, ends the runs.
    nm.max_iters = 120;
    sinkhorn.epsilon_rel = 0.1;
    sinkhorn.max_iter = 300;
    sinkhorn.tol = 1e-3;
  }
};

ExperimentOutput run_timing_comparison(const TimingConfig& cfg, const RunContext& ctx);
std::vector<ExperimentRecord> timing_task(const TimingConfig& cfg, std::uint64_t master_seed,
                                          int task_index);

}  // namespace swest
