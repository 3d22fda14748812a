// Command-line front end; all computation goes through the C API in swest.h.
#include <swest.h>

#include <cinttypes>
#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitOptimizer = 4;
constexpr int kExitInterrupted = 5;

int exit_code_for(swest_status status) {
  switch (status) {
    case SWEST_OK:
      return kExitOk;
    case SWEST_ERR_PARSE:
    case SWEST_ERR_IO:
    case SWEST_ERR_CONFIG:
    case SWEST_ERR_INVALID_ARGUMENT:
      return kExitUsage;
    case SWEST_ERR_NON_FINITE:
    case SWEST_ERR_DIMENSION_MISMATCH:
    case SWEST_ERR_SIZE_CAP:
      return kExitData;
    case SWEST_ERR_NO_CONVERGENCE:
    case SWEST_ERR_OPTIMIZER:
      return kExitOptimizer;
    case SWEST_ERR_INTERRUPTED:
      return kExitInterrupted;
    default:
      return 1;
  }
}

int fail(swest_status status) {
  std::fprintf(stderr, "error: %s\n", swest_last_error());
  return exit_code_for(status);
}

void handle_sigint(int) { swest_request_interrupt(); }

std::optional<uint64_t> env_seed_override() {
  const char* value = std::getenv("SWEST_SEED");
  if (!value || !*value) return std::nullopt;
  return std::strtoull(value, nullptr, 10);
}

json load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  json cfg;
  in >> cfg;
  return cfg;
}

struct MeasureHandle {
  swest_measure* ptr = nullptr;
  ~MeasureHandle() { swest_measure_free(ptr); }
};

}  // namespace

int main(int argc, char** argv) {
  std::signal(SIGINT, handle_sigint);

  CLI::App app{"Sliced-Wasserstein distances and minimum distance estimation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(swest_version()));

  // --- dist -----------------------------------------------------------------
  auto* dist = app.add_subcommand("dist", "Distance between two CSV point clouds");
  std::string dist_x, dist_y, dist_method = "sw";
  double dist_p = 2.0, dist_epsilon = 0.0;
  int dist_proj = 100, dist_grid = 128;
  uint64_t dist_seed = 20250810;
  dist->add_option("X", dist_x, "first measure, headerless CSV")->required();
  dist->add_option("Y", dist_y, "second measure, headerless CSV")->required();
  dist->add_option("--p", dist_p, "distance order, >= 1");
  dist->add_option("--method", dist_method, "sw | exact | sinkhorn");
  dist->add_option("--proj", dist_proj, "projection count for sw");
  dist->add_option("--k", dist_grid, "1D Monte Carlo grid size (reserved for MC solvers)");
  dist->add_option("--seed", dist_seed, "projection sampling seed");
  dist->add_option("--epsilon", dist_epsilon, "sinkhorn regularization relative to mean cost");

  // --- estimate ---------------------------------------------------------------
  auto* estimate = app.add_subcommand("estimate", "Fit an estimator from a JSON config");
  std::string est_config, est_out;
  std::optional<uint64_t> est_seed;
  estimate->add_option("--config", est_config, "JSON config document")->required();
  estimate->add_option("--out", est_out, "result JSON path (stdout when omitted)");
  estimate->add_option("--seed", est_seed, "override the config seed");

  // --- experiment ------------------------------------------------------------
  auto* experiment = app.add_subcommand("experiment", "Run a named synthetic study");
  std::string exp_name, exp_config, exp_out = ".";
  std::optional<uint64_t> exp_seed;
  std::optional<int> exp_threads, exp_scale;
  experiment->add_option("name", exp_name, "consistency | clt | meswe-vs-mswe | timing")
      ->required();
  experiment->add_option("--config", exp_config, "JSON config document (optional)");
  experiment->add_option("--out", exp_out, "output directory");
  experiment->add_option("--seed", exp_seed, "override the master seed");
  experiment->add_option("--threads", exp_threads, "worker pool size");
  experiment->add_option("--scale", exp_scale, "replication divisor for desk-scale runs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (dist->parsed()) {
      MeasureHandle x, y;
      swest_status status = swest_measure_from_csv(dist_x.c_str(), &x.ptr);
      if (status != SWEST_OK) return fail(status);
      status = swest_measure_from_csv(dist_y.c_str(), &y.ptr);
      if (status != SWEST_OK) return fail(status);

      double value = 0.0;
      status = swest_distance(x.ptr, y.ptr, dist_method.c_str(), dist_p, dist_proj, dist_seed,
                              dist_epsilon, &value);
      if (status != SWEST_OK) return fail(status);
      std::fprintf(stderr,
                   "{\"method\":\"%s\",\"p\":%g,\"projections\":%d,\"grid\":%d,\"seed\":%" PRIu64
                   ",\"n_x\":%" PRId64 ",\"n_y\":%" PRId64 ",\"d\":%" PRId64 "}\n",
                   dist_method.c_str(), dist_p, dist_proj, dist_grid, dist_seed,
                   swest_measure_size(x.ptr), swest_measure_size(y.ptr),
                   swest_measure_dim(x.ptr));
      std::printf("%.12g\n", value);
      return kExitOk;
    }

    if (estimate->parsed()) {
      json cfg = load_config_file(est_config);
      if (est_seed) cfg["seed"] = *est_seed;
      if (const auto env = env_seed_override()) cfg["seed"] = *env;

      char* result_json = nullptr;
      const swest_status status = swest_estimate_run(cfg.dump().c_str(), &result_json);
      if (result_json) {
        if (est_out.empty()) {
          std::printf("%s\n", result_json);
        } else {
          std::ofstream out(est_out);
          out << result_json << '\n';
        }
        swest_string_free(result_json);
      }
      if (status != SWEST_OK) return fail(status);
      return kExitOk;
    }

    if (experiment->parsed()) {
      json cfg = exp_config.empty() ? json::object() : load_config_file(exp_config);
      if (exp_seed) cfg["master_seed"] = *exp_seed;
      if (exp_threads) cfg["threads"] = *exp_threads;
      if (exp_scale) cfg["scale"] = *exp_scale;
      if (const auto env = env_seed_override()) cfg["master_seed"] = *env;

      const swest_status status =
          swest_experiment_run(exp_name.c_str(), cfg.dump().c_str(), exp_out.c_str());
      if (status != SWEST_OK) return fail(status);
      return kExitOk;
    }
  } catch (const json::exception& err) {
    std::fprintf(stderr, "error: config: %s\n", err.what());
    return kExitUsage;
  } catch (const std::exception& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return kExitUsage;
  }
  return kExitUsage;
}
