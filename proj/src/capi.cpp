#include "swest.h"

#include <atomic>
#include <cstdio>
#include <cstring>
#include <ctime>
#include <string>

#include <json.hpp>

#include "swest/experiments.hpp"
#include "swest/io.hpp"

using nlohmann::json;

namespace {

thread_local std::string g_last_error;
std::atomic<bool> g_interrupt{false};

swest_status map_error(const swest::SwError& err) {
  using swest::ErrorCode;
  g_last_error = err.what();
  switch (err.code()) {
    case ErrorCode::NonFiniteInput:
      return SWEST_ERR_NON_FINITE;
    case ErrorCode::DimensionMismatch:
      return SWEST_ERR_DIMENSION_MISMATCH;
    case ErrorCode::SizeCapExceeded:
      return SWEST_ERR_SIZE_CAP;
    case ErrorCode::NoConvergence:
      return SWEST_ERR_NO_CONVERGENCE;
    case ErrorCode::NonFiniteObjective:
      return SWEST_ERR_OPTIMIZER;
    case ErrorCode::ParseError:
      return SWEST_ERR_PARSE;
    case ErrorCode::IoError:
      return SWEST_ERR_IO;
    case ErrorCode::InvalidConfig:
      return SWEST_ERR_CONFIG;
    default:
      return SWEST_ERR_INVALID_ARGUMENT;
  }
}

template <typename Fn>
swest_status guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const swest::SwError& err) {
    return map_error(err);
  } catch (const json::exception& err) {
    g_last_error = err.what();
    return SWEST_ERR_CONFIG;
  } catch (const std::exception& err) {
    g_last_error = err.what();
    return SWEST_ERR_INTERNAL;
  }
}

void check_keys(const json& obj, std::initializer_list<const char*> allowed,
                const std::string& where) {
  if (!obj.is_object())
    throw swest::SwError(swest::ErrorCode::InvalidConfig, where + " must be a JSON object");
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (const char* name : allowed)
      if (key == name) {
        known = true;
        break;
      }
    if (!known)
      throw swest::SwError(swest::ErrorCode::InvalidConfig,
                           "unknown key '" + key + "' in " + where);
  }
}

json fit_config_to_json(const swest::FitConfig& fit) {
  return json{
      {"optimizer", fit.optimizer == swest::Optimizer::Adam ? "adam" : "nelder-mead"},
      {"p", fit.p},
      {"projections", fit.projections},
      {"grid_size", fit.grid_size},
      {"replicates", fit.replicates},
      {"crn", fit.crn},
      {"fixed_projections", fit.fixed_projections},
      {"adam",
       {{"lr", fit.adam.lr},
        {"beta1", fit.adam.beta1},
        {"beta2", fit.adam.beta2},
        {"eps_hat", fit.adam.eps_hat},
        {"iters", fit.adam.iters}}},
      {"nelder_mead",
       {{"max_iters", fit.nm.max_iters},
        {"f_tol", fit.nm.f_tol},
        {"x_tol", fit.nm.x_tol},
        {"simplex_scale", fit.nm.simplex_scale}}},
  };
}

void parse_fit_config(const json& obj, swest::FitConfig& fit) {
  check_keys(obj,
             {"optimizer", "p", "projections", "grid_size", "replicates", "crn",
              "fixed_projections", "adam", "nelder_mead"},
             "fit");
  if (obj.contains("optimizer")) {
    const std::string name = obj["optimizer"];
    if (name == "adam")
      fit.optimizer = swest::Optimizer::Adam;
    else if (name == "nelder-mead")
      fit.optimizer = swest::Optimizer::NelderMead;
    else
      throw swest::SwError(swest::ErrorCode::InvalidConfig, "unknown optimizer '" + name + "'");
  }
  fit.p = obj.value("p", fit.p);
  fit.projections = obj.value("projections", fit.projections);
  fit.grid_size = obj.value("grid_size", fit.grid_size);
  fit.replicates = obj.value("replicates", fit.replicates);
  fit.crn = obj.value("crn", fit.crn);
  fit.fixed_projections = obj.value("fixed_projections", fit.fixed_projections);
  if (obj.contains("adam")) {
    const json& a = obj["adam"];
    check_keys(a, {"lr", "beta1", "beta2", "eps_hat", "iters"}, "adam");
    fit.adam.lr = a.value("lr", fit.adam.lr);
    fit.adam.beta1 = a.value("beta1", fit.adam.beta1);
    fit.adam.beta2 = a.value("beta2", fit.adam.beta2);
    fit.adam.eps_hat = a.value("eps_hat", fit.adam.eps_hat);
    fit.adam.iters = a.value("iters", fit.adam.iters);
  }
  if (obj.contains("nelder_mead")) {
    const json& nm = obj["nelder_mead"];
    check_keys(nm, {"max_iters", "f_tol", "x_tol", "simplex_scale"}, "nelder_mead");
    fit.nm.max_iters = nm.value("max_iters", fit.nm.max_iters);
    fit.nm.f_tol = nm.value("f_tol", fit.nm.f_tol);
    fit.nm.x_tol = nm.value("x_tol", fit.nm.x_tol);
    fit.nm.simplex_scale = nm.value("simplex_scale", fit.nm.simplex_scale);
  }
}

swest::RunContext make_context(const json& cfg) {
  swest::RunContext ctx;
  ctx.master_seed = cfg.value("master_seed", ctx.master_seed);
  ctx.threads = cfg.value("threads", 1);
  ctx.interrupt = &g_interrupt;
  ctx.progress = [](const std::string& line) { std::fprintf(stderr, "%s\n", line.c_str()); };
  return ctx;
}

int scaled_reps(int reps, const json& cfg) {
  const int scale = cfg.value("scale", 1);
  if (scale < 1)
    throw swest::SwError(swest::ErrorCode::InvalidConfig, "scale must be a positive integer");
  return std::max(1, reps / scale);
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

std::string timestamp_now() {
  std::time_t now = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buf;
}

swest::ModelSpec parse_model(const json& obj) {
  check_keys(obj, {"kind", "d", "alpha"}, "model");
  swest::ModelSpec spec;
  const std::string kind = obj.at("kind");
  if (kind == "gaussian")
    spec.kind = swest::ModelSpec::Kind::Gaussian;
  else if (kind == "ecs_location")
    spec.kind = swest::ModelSpec::Kind::EcsLocation;
  else
    throw swest::SwError(swest::ErrorCode::InvalidConfig, "unknown model kind '" + kind + "'");
  spec.d = obj.at("d");
  if (spec.d < 1)
    throw swest::SwError(swest::ErrorCode::InvalidConfig, "model dimension must be >= 1");
  spec.alpha = obj.value("alpha", spec.alpha);
  return spec;
}

struct EstimateSetup {
  swest::ModelSpec spec;
  std::string estimator;  // "mswe" | "meswe"
  swest::FitConfig fit;
  int64_t m_gen = 0;
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
};

}  // namespace

extern "C" {

const char* swest_version(void) { return "0.1.0"; }

const char* swest_last_error(void) { return g_last_error.c_str(); }

void swest_string_free(char* s) { std::free(s); }

void swest_request_interrupt(void) { g_interrupt.store(true); }

void swest_clear_interrupt(void) { g_interrupt.store(false); }

struct swest_measure {
  swest::EmpiricalMeasure impl;
};

swest_status swest_measure_create(const double* row_major, int64_t n, int64_t d,
                                  swest_measure** out) {
  return guarded([&]() -> swest_status {
    if (!row_major || !out) {
      g_last_error = "null pointer argument";
      return SWEST_ERR_INVALID_ARGUMENT;
    }
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
        view(row_major, n, d);
    *out = new swest_measure{swest::EmpiricalMeasure(view)};
    return SWEST_OK;
  });
}

swest_status swest_measure_from_csv(const char* path, swest_measure** out) {
  return guarded([&]() -> swest_status {
    if (!path || !out) {
      g_last_error = "null pointer argument";
      return SWEST_ERR_INVALID_ARGUMENT;
    }
    *out = new swest_measure{swest::load_measure_csv(path)};
    return SWEST_OK;
  });
}

void swest_measure_free(swest_measure* measure) { delete measure; }

int64_t swest_measure_size(const swest_measure* measure) {
  return measure ? measure->impl.size() : 0;
}

int64_t swest_measure_dim(const swest_measure* measure) {
  return measure ? measure->impl.dim() : 0;
}

swest_status swest_measure_copy_points(const swest_measure* measure, double* out) {
  if (!measure || !out) {
    g_last_error = "null pointer argument";
    return SWEST_ERR_INVALID_ARGUMENT;
  }
  const auto& points = measure->impl.points();
  for (Eigen::Index i = 0; i < points.rows(); ++i)
    for (Eigen::Index j = 0; j < points.cols(); ++j) *out++ = points(i, j);
  return SWEST_OK;
}

swest_status swest_distance(const swest_measure* x, const swest_measure* y, const char* method,
                            double p, int32_t projections, uint64_t seed, double epsilon_rel,
                            double* out) {
  return guarded([&]() -> swest_status {
    if (!x || !y || !method || !out) {
      g_last_error = "null pointer argument";
      return SWEST_ERR_INVALID_ARGUMENT;
    }
    const std::string name(method);
    if (name == "sw") {
      swest::RngStream rng(seed, 0);
      const auto proj = swest::sample_projection_set(static_cast<int>(x->impl.dim()),
                                                     std::max<int32_t>(projections, 1), rng);
      *out = swest::sw_distance(x->impl, y->impl, p, proj);
    } else if (name == "exact") {
      *out = swest::w_exact_assignment(x->impl, y->impl, p);
    } else if (name == "sinkhorn") {
      swest::SinkhornConfig cfg;
      if (epsilon_rel > 0.0) cfg.epsilon_rel = epsilon_rel;
      *out = swest::sinkhorn_distance(x->impl, y->impl, p, cfg);
    } else {
      g_last_error = "unknown distance method '" + name + "'";
      return SWEST_ERR_CONFIG;
    }
    return SWEST_OK;
  });
}

swest_status swest_estimate_run(const char* config_json, char** result_json) {
  return guarded([&]() -> swest_status {
    if (!config_json || !result_json) {
      g_last_error = "null pointer argument";
      return SWEST_ERR_INVALID_ARGUMENT;
    }
    const json cfg = json::parse(config_json);
    check_keys(cfg,
               {"estimator", "model", "data", "self_test", "method", "fit", "m", "theta0", "seed",
                "stream_id"},
               "estimate config");

    EstimateSetup setup;
    setup.spec = parse_model(cfg.at("model"));
    setup.estimator = cfg.value("estimator", "meswe");
    if (setup.estimator != "mswe" && setup.estimator != "meswe")
      throw swest::SwError(swest::ErrorCode::InvalidConfig,
                           "estimator must be 'mswe' or 'meswe'");
    if (setup.estimator == "mswe" && setup.spec.kind != swest::ModelSpec::Kind::Gaussian)
      throw swest::SwError(swest::ErrorCode::InvalidConfig,
                           "mswe needs the gaussian model (tractable projected density)");
    if (cfg.contains("fit")) parse_fit_config(cfg.at("fit"), setup.fit);
    if (cfg.contains("method")) {
      const std::string method = cfg.at("method");
      if (method == "adam")
        setup.fit.optimizer = swest::Optimizer::Adam;
      else if (method == "nelder-mead")
        setup.fit.optimizer = swest::Optimizer::NelderMead;
      else
        throw swest::SwError(swest::ErrorCode::InvalidConfig, "unknown method '" + method + "'");
    }
    setup.seed = cfg.value("seed", std::uint64_t{20250810});
    setup.stream_id = cfg.value("stream_id", std::uint64_t{0});
    setup.m_gen = cfg.value("m", int64_t{1000});

    // Observations: a CSV path, or a synthetic self-test draw from theta_star.
    std::optional<swest::EmpiricalMeasure> data;
    json self_test_echo;
    Eigen::VectorXd theta_star;
    if (cfg.contains("data")) {
      data = swest::load_measure_csv(cfg.at("data").get<std::string>());
      if (data->dim() != setup.spec.d)
        throw swest::SwError(swest::ErrorCode::DimensionMismatch,
                             "data dimension does not match model dimension");
    } else if (cfg.contains("self_test")) {
      const json& st = cfg.at("self_test");
      check_keys(st, {"n", "m", "sigma2", "location", "mse_threshold"}, "self_test");
      const int64_t n = st.value("n", int64_t{1000});
      swest::RngStream data_rng(setup.seed, setup.stream_id + 64);
      if (setup.spec.kind == swest::ModelSpec::Kind::Gaussian) {
        const double m_value = st.value("m", 0.0);
        const double sigma2 = st.value("sigma2", 1.0);
        const Eigen::VectorXd mean = Eigen::VectorXd::Constant(setup.spec.d, m_value);
        data = swest::sample_gaussian(mean, sigma2, n, data_rng);
        theta_star.resize(setup.spec.d + 1);
        theta_star << mean, sigma2;
      } else {
        const double location = st.value("location", 2.0);
        const Eigen::VectorXd m_vec = Eigen::VectorXd::Constant(setup.spec.d, location);
        data = swest::sample_model(swest::ECSLocationParams{m_vec, setup.spec.alpha}, n, data_rng);
        theta_star = m_vec;
      }
      self_test_echo = st;
      self_test_echo["n"] = n;
    } else {
      throw swest::SwError(swest::ErrorCode::InvalidConfig,
                           "config needs either 'data' or 'self_test'");
    }

    // Starting point: explicit theta0 or data-driven default.
    swest::ModelParams theta0 = swest::default_theta0(setup.spec, *data);
    if (cfg.contains("theta0") && cfg.at("theta0").is_object()) {
      const json& t0 = cfg.at("theta0");
      check_keys(t0, {"m", "sigma2"}, "theta0");
      Eigen::VectorXd m0(setup.spec.d);
      if (t0.at("m").is_array()) {
        const auto values = t0.at("m").get<std::vector<double>>();
        if (static_cast<int>(values.size()) != setup.spec.d)
          throw swest::SwError(swest::ErrorCode::InvalidConfig, "theta0.m has wrong length");
        m0 = Eigen::Map<const Eigen::VectorXd>(values.data(), setup.spec.d);
      } else {
        m0.setConstant(t0.at("m").get<double>());
      }
      if (setup.spec.kind == swest::ModelSpec::Kind::Gaussian)
        theta0 = swest::GaussianParams{m0, t0.value("sigma2", 1.0)};
      else
        theta0 = swest::ECSLocationParams{m0, setup.spec.alpha};
    } else if (cfg.contains("theta0") && cfg.at("theta0") != json("auto")) {
      throw swest::SwError(swest::ErrorCode::InvalidConfig,
                           "theta0 must be \"auto\" or an object");
    }

    const swest::RngStream fit_stream(setup.seed, setup.stream_id);
    swest::EstimateResult result;
    if (setup.estimator == "mswe") {
      result = swest::fit_mswe_gaussian(*data, std::get<swest::GaussianParams>(theta0), setup.fit,
                                        fit_stream);
    } else {
      result = swest::fit_meswe(setup.spec, theta0, *data, setup.m_gen, setup.fit, fit_stream);
    }

    json resolved = cfg;
    resolved["estimator"] = setup.estimator;
    resolved["seed"] = setup.seed;
    resolved["stream_id"] = setup.stream_id;
    resolved["m"] = setup.m_gen;
    resolved["fit"] = fit_config_to_json(setup.fit);
    resolved.erase("method");

    json out;
    const auto d = setup.spec.d;
    json theta_hat;
    theta_hat["m"] = std::vector<double>(result.theta_hat.data(), result.theta_hat.data() + d);
    if (setup.spec.kind == swest::ModelSpec::Kind::Gaussian)
      theta_hat["sigma2"] = result.theta_hat[d];
    out["theta_hat"] = theta_hat;
    out["objective_trace"] = result.objective_trace;
    out["n_evals"] = result.n_evals;
    out["wall_time_s"] = result.wall_time_s;
    out["seed"] = result.seed;
    out["stream_id"] = result.stream_id;
    out["converged"] = result.converged;
    if (!result.failure.empty()) out["failure"] = result.failure;
    out["config"] = resolved;
    out["timestamp"] = timestamp_now();
    if (!self_test_echo.is_null()) {
      Eigen::VectorXd truth = theta_star;
      const double mse = (result.theta_hat - truth).squaredNorm() / truth.size();
      const double threshold = self_test_echo.value("mse_threshold", 0.05);
      out["self_test"] = {{"mse", mse}, {"threshold", threshold}, {"pass", mse <= threshold}};
    }

    *result_json = dup_string(out.dump(2));
    if (!result.failure.empty()) {
      g_last_error = "optimizer failure: " + result.failure;
      return SWEST_ERR_OPTIMIZER;
    }
    return SWEST_OK;
  });
}

swest_status swest_experiment_run(const char* name, const char* config_json,
                                  const char* out_dir) {
  return guarded([&]() -> swest_status {
    if (!name || !out_dir) {
      g_last_error = "null pointer argument";
      return SWEST_ERR_INVALID_ARGUMENT;
    }
    const json cfg = config_json && *config_json ? json::parse(config_json) : json::object();
    const std::string experiment(name);
    const swest::RunContext ctx = make_context(cfg);

    swest::ExperimentOutput output;
    json resolved = cfg;
    resolved["master_seed"] = ctx.master_seed;
    resolved["threads"] = ctx.threads;

    if (experiment == "consistency") {
      check_keys(cfg, {"master_seed", "threads", "scale", "ns", "reps", "d", "fit"},
                 "consistency config");
      swest::ConsistencyConfig exp_cfg;
      if (cfg.contains("ns")) exp_cfg.ns = cfg.at("ns").get<std::vector<std::int64_t>>();
      exp_cfg.reps = scaled_reps(cfg.value("reps", exp_cfg.reps), cfg);
      exp_cfg.d = cfg.value("d", exp_cfg.d);
      if (cfg.contains("fit")) parse_fit_config(cfg.at("fit"), exp_cfg.fit);
      resolved["ns"] = exp_cfg.ns;
      resolved["reps"] = exp_cfg.reps;
      resolved["d"] = exp_cfg.d;
      resolved["fit"] = fit_config_to_json(exp_cfg.fit);
      output = swest::run_consistency_gaussian(exp_cfg, ctx);
    } else if (experiment == "clt") {
      check_keys(cfg, {"master_seed", "threads", "scale", "ns", "reps", "d", "kde_grid", "fit"},
                 "clt config");
      swest::CltConfig exp_cfg;
      if (cfg.contains("ns")) exp_cfg.ns = cfg.at("ns").get<std::vector<std::int64_t>>();
      exp_cfg.reps = scaled_reps(cfg.value("reps", exp_cfg.reps), cfg);
      exp_cfg.d = cfg.value("d", exp_cfg.d);
      exp_cfg.kde_grid = cfg.value("kde_grid", exp_cfg.kde_grid);
      if (cfg.contains("fit")) parse_fit_config(cfg.at("fit"), exp_cfg.fit);
      resolved["ns"] = exp_cfg.ns;
      resolved["reps"] = exp_cfg.reps;
      resolved["d"] = exp_cfg.d;
      resolved["fit"] = fit_config_to_json(exp_cfg.fit);
      output = swest::run_clt_gaussian(exp_cfg, ctx).output;
    } else if (experiment == "meswe-vs-mswe") {
      check_keys(cfg,
                 {"master_seed", "threads", "scale", "model", "n", "ms", "reps", "d", "alpha",
                  "location_star", "m_reference", "fit"},
                 "meswe-vs-mswe config");
      swest::MesweToMsweConfig exp_cfg;
      const std::string model = cfg.value("model", "gaussian");
      if (model == "gaussian") {
        exp_cfg.model = swest::ModelSpec::Kind::Gaussian;
        exp_cfg.n_fixed = 2000;
      } else if (model == "ecs") {
        exp_cfg.model = swest::ModelSpec::Kind::EcsLocation;
        exp_cfg.n_fixed = 100;
      } else {
        throw swest::SwError(swest::ErrorCode::InvalidConfig,
                             "model must be 'gaussian' or 'ecs'");
      }
      exp_cfg.n_fixed = cfg.value("n", exp_cfg.n_fixed);
      if (cfg.contains("ms")) exp_cfg.ms = cfg.at("ms").get<std::vector<std::int64_t>>();
      exp_cfg.reps = scaled_reps(cfg.value("reps", exp_cfg.reps), cfg);
      exp_cfg.d = cfg.value("d", exp_cfg.d);
      exp_cfg.alpha = cfg.value("alpha", exp_cfg.alpha);
      exp_cfg.location_star = cfg.value("location_star", exp_cfg.location_star);
      exp_cfg.m_reference = cfg.value("m_reference", exp_cfg.m_reference);
      if (cfg.contains("fit")) parse_fit_config(cfg.at("fit"), exp_cfg.fit);
      resolved["model"] = model;
      resolved["n"] = exp_cfg.n_fixed;
      resolved["ms"] = exp_cfg.ms;
      resolved["reps"] = exp_cfg.reps;
      resolved["fit"] = fit_config_to_json(exp_cfg.fit);
      output = swest::run_meswe_to_mswe(exp_cfg, ctx);
    } else if (experiment == "timing") {
      check_keys(cfg,
                 {"master_seed", "threads", "scale", "ds", "n", "m", "reps", "alpha",
                  "location_star", "p", "projections", "replicates", "nelder_mead", "sinkhorn"},
                 "timing config");
      swest::TimingConfig exp_cfg;
      if (cfg.contains("ds")) exp_cfg.ds = cfg.at("ds").get<std::vector<int>>();
      exp_cfg.n = cfg.value("n", exp_cfg.n);
      exp_cfg.m = cfg.value("m", exp_cfg.m);
      exp_cfg.reps = scaled_reps(cfg.value("reps", exp_cfg.reps), cfg);
      exp_cfg.alpha = cfg.value("alpha", exp_cfg.alpha);
      exp_cfg.location_star = cfg.value("location_star", exp_cfg.location_star);
      exp_cfg.p = cfg.value("p", exp_cfg.p);
      exp_cfg.projections = cfg.value("projections", exp_cfg.projections);
      exp_cfg.replicates = cfg.value("replicates", exp_cfg.replicates);
      if (cfg.contains("nelder_mead")) {
        const json& nm = cfg.at("nelder_mead");
        check_keys(nm, {"max_iters", "f_tol", "x_tol", "simplex_scale"}, "nelder_mead");
        exp_cfg.nm.max_iters = nm.value("max_iters", exp_cfg.nm.max_iters);
        exp_cfg.nm.f_tol = nm.value("f_tol", exp_cfg.nm.f_tol);
        exp_cfg.nm.x_tol = nm.value("x_tol", exp_cfg.nm.x_tol);
        exp_cfg.nm.simplex_scale = nm.value("simplex_scale", exp_cfg.nm.simplex_scale);
      }
      if (cfg.contains("sinkhorn")) {
        const json& sk = cfg.at("sinkhorn");
        check_keys(sk, {"epsilon_rel", "max_iter", "tol"}, "sinkhorn");
        exp_cfg.sinkhorn.epsilon_rel = sk.value("epsilon_rel", exp_cfg.sinkhorn.epsilon_rel);
        exp_cfg.sinkhorn.max_iter = sk.value("max_iter", exp_cfg.sinkhorn.max_iter);
        exp_cfg.sinkhorn.tol = sk.value("tol", exp_cfg.sinkhorn.tol);
      }
      resolved["ds"] = exp_cfg.ds;
      resolved["n"] = exp_cfg.n;
      resolved["m"] = exp_cfg.m;
      resolved["reps"] = exp_cfg.reps;
      resolved["p"] = exp_cfg.p;
      resolved["sinkhorn"] = {{"epsilon_rel", exp_cfg.sinkhorn.epsilon_rel},
                              {"max_iter", exp_cfg.sinkhorn.max_iter},
                              {"tol", exp_cfg.sinkhorn.tol}};
      output = swest::run_timing_comparison(exp_cfg, ctx);
    } else {
      g_last_error = "unknown experiment '" + experiment + "'";
      return SWEST_ERR_CONFIG;
    }

    swest::write_experiment_output(output, out_dir, resolved.dump(), ctx.master_seed);
    if (output.interrupted) {
      g_last_error = "interrupted; partial results flushed";
      return SWEST_ERR_INTERRUPTED;
    }
    if (!output.failure.empty()) {
      g_last_error = output.failure;
      return SWEST_ERR_INTERNAL;
    }
    return SWEST_OK;
  });
}

}  // extern "C"
