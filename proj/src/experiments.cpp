#include "swest/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace swest {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Batch offsets inside one replication's stream block (stream_id =
// task * 2^20 + batch). Each fit gets a 16-wide sub-block for its own
// internal batches.
constexpr std::uint64_t kBatchData = 0;
constexpr std::uint64_t kBatchFitBase = 16;
constexpr std::uint64_t kBatchStride = 16;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double mse_between(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return (a - b).squaredNorm() / static_cast<double>(a.size());
}

struct Pool {
  // Runs task(i) for i in [0, n_tasks) over a bounded worker pool. Stream
  // assignment depends only on i, so output is identical for any thread
  // count; completed[] marks slots safe to flush after an interrupt.
  static void run(int n_tasks, int threads, const std::function<void(int)>& task,
                  const std::atomic<bool>* interrupt, std::vector<char>& completed,
                  std::string& failure) {
    completed.assign(n_tasks, 0);
    std::atomic<int> next{0};
    std::atomic<bool> stop{false};
    std::mutex failure_mutex;
    auto worker = [&] {
      while (!stop.load(std::memory_order_relaxed)) {
        if (interrupt && interrupt->load(std::memory_order_relaxed)) break;
        const int i = next.fetch_add(1, std::memory_order_relaxed);
        if (i >= n_tasks) break;
        try {
          task(i);
          completed[i] = 1;
        } catch (const std::exception& err) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (failure.empty()) failure = err.what();
          stop.store(true, std::memory_order_relaxed);
        }
      }
    };
    const int worker_count = std::max(1, threads);
    if (worker_count == 1) {
      worker();
      return;
    }
    std::vector<std::thread> pool;
    pool.reserve(worker_count);
    for (int t = 0; t < worker_count; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
};

struct TaskTimer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

Eigen::VectorXd constant_vector(int d, double value) {
  return Eigen::VectorXd::Constant(d, value);
}

void report(const RunContext& ctx, const std::string& line) {
  if (ctx.progress) ctx.progress(line);
}

template <typename TaskFn>
ExperimentOutput run_tasks(const std::string& name, int n_tasks, int records_per_task,
                           const RunContext& ctx, const TaskFn& task_records) {
  ExperimentOutput output;
  output.name = name;
  std::vector<std::vector<ExperimentRecord>> slots(n_tasks);
  std::vector<char> completed;
  Pool::run(
      n_tasks, ctx.threads,
      [&](int i) {
        slots[i] = task_records(i);
        report(ctx, name + ": task " + std::to_string(i + 1) + "/" + std::to_string(n_tasks));
      },
      ctx.interrupt, completed, output.failure);
  output.interrupted = ctx.interrupt && ctx.interrupt->load();
  output.records.reserve(static_cast<std::size_t>(n_tasks) * records_per_task);
  for (int i = 0; i < n_tasks; ++i) {
    if (!completed[i]) continue;
    for (auto& record : slots[i]) output.records.push_back(std::move(record));
  }
  return output;
}

}  // namespace

KdeEstimate kde(const std::vector<double>& samples, int grid_size) {
  const auto k = samples.size();
  if (k < 2) throw SwError(ErrorCode::DegenerateSample, "kde needs at least two samples");
  if (grid_size < 2) throw SwError(ErrorCode::OutOfRange, "kde grid needs at least two points");
  double mean = 0.0;
  for (double x : samples) mean += x;
  mean /= static_cast<double>(k);
  double var = 0.0;
  for (double x : samples) var += (x - mean) * (x - mean);
  var /= static_cast<double>(k - 1);
  const double sd = std::sqrt(var);
  if (!(sd > 0.0)) throw SwError(ErrorCode::DegenerateSample, "kde sample has zero variance");

  const SortedSample1D sorted{std::vector<double>(samples)};
  const double iqr = sorted.quantile(0.75) - sorted.quantile(0.25);
  const double scale = iqr > 0.0 ? std::min(sd, iqr / 1.34) : sd;
  const double bandwidth = 0.9 * scale * std::pow(static_cast<double>(k), -0.2);

  KdeEstimate estimate;
  estimate.bandwidth = bandwidth;
  estimate.grid.resize(grid_size);
  estimate.density.resize(grid_size);
  const double lo = mean - 4.0 * sd;
  const double hi = mean + 4.0 * sd;
  const double norm = 1.0 / (static_cast<double>(k) * bandwidth * std::sqrt(2.0 * kPi));
  for (int g = 0; g < grid_size; ++g) {
    const double x = lo + (hi - lo) * g / (grid_size - 1);
    double density = 0.0;
    for (double s : samples) {
      const double z = (x - s) / bandwidth;
      density += std::exp(-0.5 * z * z);
    }
    estimate.grid[g] = x;
    estimate.density[g] = density * norm;
  }
  return estimate;
}

LogLogFit loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size())
    throw SwError(ErrorCode::ShapeMismatch, "loglog fit needs matching vectors");
  if (xs.size() < 3) throw SwError(ErrorCode::InsufficientPoints, "loglog fit needs >= 3 points");
  const auto k = xs.size();
  std::vector<double> lx(k), ly(k);
  for (std::size_t i = 0; i < k; ++i) {
    if (!(xs[i] > 0.0 && ys[i] > 0.0))
      throw SwError(ErrorCode::NonPositive, "loglog fit needs positive values");
    lx[i] = std::log(xs[i]);
    ly[i] = std::log(ys[i]);
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= static_cast<double>(k);
  my /= static_cast<double>(k);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (!(sxx > 0.0)) throw SwError(ErrorCode::DegenerateSample, "loglog fit needs distinct x values");
  LogLogFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (syy > 0.0) {
    const double ss_res = syy - fit.slope * sxy;
    fit.r2 = 1.0 - ss_res / syy;
  } else {
    fit.r2 = 1.0;
  }
  return fit;
}

std::string records_to_csv(const std::vector<ExperimentRecord>& records) {
  std::ostringstream out;
  out << "experiment,rep,n,m,d,method,mse,wall_time_s,seed\n";
  for (const auto& r : records) {
    out << r.experiment << ',' << r.rep << ',' << r.n << ',' << r.m << ',' << r.d << ','
        << r.method << ',' << format_double(r.mse) << ',' << format_double(r.wall_time_s) << ','
        << r.seed << '\n';
  }
  return out.str();
}

void write_experiment_output(const ExperimentOutput& output, const std::string& out_dir,
                             const std::string& resolved_config_json,
                             std::uint64_t master_seed) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw SwError(ErrorCode::IoError, "cannot create output directory " + out_dir);

  const fs::path dir(out_dir);
  {
    std::ofstream csv(dir / (output.name + ".csv"));
    if (!csv) throw SwError(ErrorCode::IoError, "cannot write records CSV");
    csv << records_to_csv(output.records);
  }
  for (const auto& [filename, content] : output.extra_files) {
    std::ofstream file(dir / filename);
    if (!file) throw SwError(ErrorCode::IoError, "cannot write " + filename);
    file << content;
  }

  nlohmann::json meta;
  meta["experiment"] = output.name;
  meta["master_seed"] = master_seed;
  meta["records"] = output.records.size();
  meta["interrupted"] = output.interrupted;
  if (!output.failure.empty()) meta["failure"] = output.failure;
  meta["config"] = nlohmann::json::parse(resolved_config_json, nullptr, false).is_discarded()
                       ? nlohmann::json(resolved_config_json)
                       : nlohmann::json::parse(resolved_config_json);
  {
    std::time_t now = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    meta["timestamp"] = buf;
  }
  std::ofstream metafile(dir / (output.name + "_meta.json"));
  if (!metafile) throw SwError(ErrorCode::IoError, "cannot write metadata sidecar");
  metafile << meta.dump(2) << '\n';
}

// ---------------------------------------------------------------------------

std::vector<ExperimentRecord> consistency_task(const ConsistencyConfig& cfg,
                                               std::uint64_t master_seed, int task_index) {
  const int n_index = task_index / cfg.reps;
  const int rep = task_index % cfg.reps;
  const std::int64_t n = cfg.ns[n_index];
  const RngStream block(master_seed, stream_id_for(task_index, 0));

  RngStream data_rng = block.substream(kBatchData);
  const Eigen::VectorXd theta_star_m = Eigen::VectorXd::Zero(cfg.d);
  const EmpiricalMeasure data = sample_gaussian(theta_star_m, 1.0, n, data_rng);
  Eigen::VectorXd theta_star(cfg.d + 1);
  theta_star << theta_star_m, 1.0;

  const ModelSpec spec{ModelSpec::Kind::Gaussian, cfg.d, 0.0};
  const auto theta0 = std::get<GaussianParams>(default_theta0(spec, data));

  std::vector<ExperimentRecord> records;
  {
    TaskTimer timer;
    const EstimateResult fit =
        fit_mswe_gaussian(data, theta0, cfg.fit, block.substream(kBatchFitBase));
    records.push_back({"consistency", rep, n, 0, cfg.d, "mswe",
                       mse_between(fit.theta_hat, theta_star), timer.seconds(), master_seed});
  }
  {
    TaskTimer timer;
    const EstimateResult fit = fit_meswe(spec, ModelParams{theta0}, data, n, cfg.fit,
                                         block.substream(kBatchFitBase + kBatchStride));
    records.push_back({"consistency", rep, n, n, cfg.d, "meswe",
                       mse_between(fit.theta_hat, theta_star), timer.seconds(), master_seed});
  }
  return records;
}

ExperimentOutput run_consistency_gaussian(const ConsistencyConfig& cfg, const RunContext& ctx) {
  const int n_tasks = static_cast<int>(cfg.ns.size()) * cfg.reps;
  return run_tasks("consistency", n_tasks, 2, ctx, [&](int i) {
    return consistency_task(cfg, ctx.master_seed, i);
  });
}

// ---------------------------------------------------------------------------

namespace {

struct CltTaskResult {
  ExperimentRecord record;
  double sigma2_hat = 0.0;
};

CltTaskResult clt_task(const CltConfig& cfg, std::uint64_t master_seed, int task_index) {
  const int n_index = task_index / cfg.reps;
  const int rep = task_index % cfg.reps;
  const std::int64_t n = cfg.ns[n_index];
  const RngStream block(master_seed, stream_id_for(task_index, 0));

  RngStream data_rng = block.substream(kBatchData);
  const EmpiricalMeasure data = sample_gaussian(Eigen::VectorXd::Zero(cfg.d), 1.0, n, data_rng);
  const ModelSpec spec{ModelSpec::Kind::Gaussian, cfg.d, 0.0};
  const auto theta0 = std::get<GaussianParams>(default_theta0(spec, data));

  TaskTimer timer;
  const EstimateResult fit =
      fit_mswe_gaussian(data, theta0, cfg.fit, block.substream(kBatchFitBase));
  Eigen::VectorXd theta_star(cfg.d + 1);
  theta_star << Eigen::VectorXd::Zero(cfg.d), 1.0;

  CltTaskResult result;
  result.sigma2_hat = fit.theta_hat[cfg.d];
  result.record = {"clt",          rep,
                   n,              0,
                   cfg.d,          "mswe_p1",
                   mse_between(fit.theta_hat, theta_star), timer.seconds(),
                   master_seed};
  return result;
}

}  // namespace

CltOutput run_clt_gaussian(const CltConfig& cfg, const RunContext& ctx) {
  const int n_count = static_cast<int>(cfg.ns.size());
  const int n_tasks = n_count * cfg.reps;

  CltOutput result;
  std::vector<CltTaskResult> slots(n_tasks);
  std::vector<char> completed;
  result.output.name = "clt";
  Pool::run(
      n_tasks, ctx.threads,
      [&](int i) {
        slots[i] = clt_task(cfg, ctx.master_seed, i);
        report(ctx, "clt: task " + std::to_string(i + 1) + "/" + std::to_string(n_tasks));
      },
      ctx.interrupt, completed, result.output.failure);
  result.output.interrupted = ctx.interrupt && ctx.interrupt->load();

  result.sigma2_by_n.assign(n_count, {});
  result.rescaled_by_n.assign(n_count, {});
  for (int i = 0; i < n_tasks; ++i) {
    if (!completed[i]) continue;
    result.output.records.push_back(slots[i].record);
    const int n_index = i / cfg.reps;
    const double sigma2 = slots[i].sigma2_hat;
    result.sigma2_by_n[n_index].push_back(sigma2);
    result.rescaled_by_n[n_index].push_back(
        std::sqrt(static_cast<double>(cfg.ns[n_index])) * (sigma2 - 1.0));
  }

  for (int j = 0; j < n_count; ++j) {
    std::ostringstream samples;
    samples << "rep,sigma2_hat,rescaled\n";
    for (std::size_t r = 0; r < result.sigma2_by_n[j].size(); ++r)
      samples << r << ',' << format_double(result.sigma2_by_n[j][r]) << ','
              << format_double(result.rescaled_by_n[j][r]) << '\n';
    result.output.extra_files.emplace_back("clt_samples_n" + std::to_string(cfg.ns[j]) + ".csv",
                                           samples.str());
    if (result.rescaled_by_n[j].size() >= 2) {
      const KdeEstimate density = kde(result.rescaled_by_n[j], cfg.kde_grid);
      result.kde_by_n.push_back(density);
      std::ostringstream kde_csv;
      kde_csv << "grid,density\n";
      for (std::size_t g = 0; g < density.grid.size(); ++g)
        kde_csv << format_double(density.grid[g]) << ',' << format_double(density.density[g])
                << '\n';
      result.output.extra_files.emplace_back("clt_kde_n" + std::to_string(cfg.ns[j]) + ".csv",
                                             kde_csv.str());
    }
  }
  return result;
}

// ---------------------------------------------------------------------------

std::vector<ExperimentRecord> meswe_to_mswe_task(const MesweToMsweConfig& cfg,
                                                 std::uint64_t master_seed, int task_index) {
  const int rep = task_index;
  const RngStream block(master_seed, stream_id_for(task_index, 0));
  const bool gaussian = cfg.model == ModelSpec::Kind::Gaussian;
  const ModelSpec spec{gaussian ? ModelSpec::Kind::Gaussian : ModelSpec::Kind::EcsLocation, cfg.d,
                       cfg.alpha};

  RngStream data_rng = block.substream(kBatchData);
  const EmpiricalMeasure data =
      gaussian ? sample_gaussian(Eigen::VectorXd::Zero(cfg.d), 1.0, cfg.n_fixed, data_rng)
               : sample_model(ECSLocationParams{constant_vector(cfg.d, cfg.location_star),
                                                cfg.alpha},
                              cfg.n_fixed, data_rng);
  const ModelParams theta0 = default_theta0(spec, data);

  // Reference estimator on the same observations: MSWE for the Gaussian
  // model, MESWE at a large m for the stable model (no tractable density).
  Eigen::VectorXd reference;
  if (gaussian) {
    const EstimateResult fit = fit_mswe_gaussian(data, std::get<GaussianParams>(theta0), cfg.fit,
                                                 block.substream(kBatchFitBase));
    reference = fit.theta_hat;
  } else {
    const EstimateResult fit = fit_meswe(spec, theta0, data, cfg.m_reference, cfg.fit,
                                         block.substream(kBatchFitBase));
    reference = fit.theta_hat;
  }

  std::vector<ExperimentRecord> records;
  for (std::size_t j = 0; j < cfg.ms.size(); ++j) {
    TaskTimer timer;
    const EstimateResult fit =
        fit_meswe(spec, theta0, data, cfg.ms[j], cfg.fit,
                  block.substream(kBatchFitBase + kBatchStride * (j + 1)));
    records.push_back({gaussian ? "meswe_vs_mswe_gaussian" : "meswe_vs_mswe_ecs", rep, cfg.n_fixed,
                       cfg.ms[j], cfg.d, "meswe", mse_between(fit.theta_hat, reference),
                       timer.seconds(), master_seed});
  }
  return records;
}

ExperimentOutput run_meswe_to_mswe(const MesweToMsweConfig& cfg, const RunContext& ctx) {
  const bool gaussian = cfg.model == ModelSpec::Kind::Gaussian;
  const std::string name = gaussian ? "meswe_vs_mswe_gaussian" : "meswe_vs_mswe_ecs";
  auto output = run_tasks(name, cfg.reps, static_cast<int>(cfg.ms.size()), ctx, [&](int i) {
    return meswe_to_mswe_task(cfg, ctx.master_seed, i);
  });
  return output;
}

// ---------------------------------------------------------------------------

namespace {

// Expected-distance objective for the Wasserstein baselines: fresh generated
// datasets per evaluation, as in the reference estimators.
double mewe_objective(const ECSLocationParams& params, const EmpiricalMeasure& data,
                      std::int64_t m, int replicates, double p, bool use_sinkhorn,
                      const SinkhornConfig& sinkhorn_cfg, RngStream& rng, long& failed_evals) {
  double acc = 0.0;
  for (int r = 0; r < replicates; ++r) {
    const EmpiricalMeasure generated = sample_model(ModelParams{params}, m, rng);
    if (use_sinkhorn) {
      try {
        acc += sinkhorn_distance(data, generated, p, sinkhorn_cfg);
      } catch (const SwError& err) {
        if (err.code() != ErrorCode::NoConvergence) throw;
        ++failed_evals;
        return std::numeric_limits<double>::infinity();
      }
    } else {
      acc += w_exact_assignment(data, generated, p);
    }
  }
  return acc / replicates;
}

}  // namespace

std::vector<ExperimentRecord> timing_task(const TimingConfig& cfg, std::uint64_t master_seed,
                                          int task_index) {
  const int d_index = task_index / cfg.reps;
  const int rep = task_index % cfg.reps;
  const int d = cfg.ds[d_index];
  const RngStream block(master_seed, stream_id_for(task_index, 0));

  const Eigen::VectorXd m_star = constant_vector(d, cfg.location_star);
  RngStream data_rng = block.substream(kBatchData);
  const EmpiricalMeasure data =
      sample_model(ECSLocationParams{m_star, cfg.alpha}, cfg.n, data_rng);

  const ModelSpec spec{ModelSpec::Kind::EcsLocation, d, cfg.alpha};
  const ModelParams theta0 = default_theta0(spec, data);

  std::vector<ExperimentRecord> records;
  auto push = [&](const std::string& method, double mse, double wall) {
    records.push_back({"timing", rep, cfg.n, cfg.m, d, method, mse, wall, master_seed});
  };

  {
    FitConfig fit;
    fit.optimizer = Optimizer::NelderMead;
    fit.p = cfg.p;
    fit.projections = cfg.projections;
    fit.replicates = cfg.replicates;
    fit.crn = false;  // fresh projections and datasets per evaluation
    fit.nm = cfg.nm;
    TaskTimer timer;
    const EstimateResult fit_result =
        fit_meswe(spec, theta0, data, cfg.m, fit, block.substream(kBatchFitBase));
    push("meswe", mse_between(fit_result.theta_hat, m_star), timer.seconds());
  }

  for (const bool use_sinkhorn : {false, true}) {
    const std::uint64_t batch = kBatchFitBase + kBatchStride * (use_sinkhorn ? 2 : 1);
    RngStream eval_rng = block.substream(batch);
    long failed_evals = 0;
    auto value_fn = [&](const Eigen::VectorXd& theta) {
      return mewe_objective(ECSLocationParams{theta, cfg.alpha}, data, cfg.m, cfg.replicates,
                            cfg.p, use_sinkhorn, cfg.sinkhorn, eval_rng, failed_evals);
    };
    TaskTimer timer;
    try {
      const EstimateResult fit_result =
          nelder_mead_minimize(value_fn, pack_theta(theta0), cfg.nm);
      push(use_sinkhorn ? "mewe_sinkhorn" : "mewe_exact",
           mse_between(fit_result.theta_hat, m_star), timer.seconds());
    } catch (const SwError& err) {
      if (err.code() != ErrorCode::SizeCapExceeded) throw;
      // Skipped cell: the exact solver refuses sizes above its cap.
      push(use_sinkhorn ? "mewe_sinkhorn" : "mewe_exact",
           std::numeric_limits<double>::quiet_NaN(), 0.0);
    }
  }
  return records;
}

ExperimentOutput run_timing_comparison(const TimingConfig& cfg, const RunContext& ctx) {
  const int n_tasks = static_cast<int>(cfg.ds.size()) * cfg.reps;
  return run_tasks("timing", n_tasks, 3, ctx, [&](int i) {
    return timing_task(cfg, ctx.master_seed, i);
  });
}

}  // namespace swest
