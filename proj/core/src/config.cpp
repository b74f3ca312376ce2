#include "svi/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace svi {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string &where, const std::string &what) {
  throw std::invalid_argument("config: " + where + ": " + what);
}

void check_object(const json &j, const std::string &where,
                  std::initializer_list<std::string_view> allowed) {
  if (!j.is_object()) {
    fail(where, "expected an object");
  }
  for (const auto &[key, value] : j.items()) {
    bool known = false;
    for (const auto a : allowed) {
      known = known || key == a;
    }
    if (!known) {
      fail(where, "unknown key '" + key + "'");
    }
  }
}

double get_real(const json &j, const std::string &where) {
  if (!j.is_number()) {
    fail(where, "expected a number");
  }
  return j.get<double>();
}

std::int64_t get_int(const json &j, const std::string &where) {
  if (!j.is_number_integer()) {
    fail(where, "expected an integer");
  }
  return j.get<std::int64_t>();
}

std::uint64_t get_uint(const json &j, const std::string &where) {
  if (!j.is_number_unsigned()) {
    fail(where, "expected a non-negative integer");
  }
  return j.get<std::uint64_t>();
}

std::string get_string(const json &j, const std::string &where) {
  if (!j.is_string()) {
    fail(where, "expected a string");
  }
  return j.get<std::string>();
}

bool get_bool(const json &j, const std::string &where) {
  if (!j.is_boolean()) {
    fail(where, "expected true or false");
  }
  return j.get<bool>();
}

template <class Parse>
auto get_enum(const json &j, const std::string &where, Parse parse) {
  try {
    return parse(get_string(j, where));
  } catch (const std::invalid_argument &e) {
    fail(where, e.what());
  }
}

ModelSpec parse_model(const json &j) {
  if (!j.is_object() || !j.contains("type")) {
    fail("model", "expected an object with a 'type'");
  }
  ModelSpec spec;
  const std::string type = get_string(j.at("type"), "model.type");
  if (type == "synthetic") {
    check_object(j, "model", {"type", "dim", "seed", "eigen_range"});
    spec.kind = ModelKind::Synthetic;
    if (j.contains("dim")) spec.dim = get_int(j["dim"], "model.dim");
    if (j.contains("seed")) spec.seed = get_uint(j["seed"], "model.seed");
    if (j.contains("eigen_range")) {
      const json &range = j["eigen_range"];
      if (!range.is_array() || range.size() != 2) {
        fail("model.eigen_range", "expected [low, high]");
      }
      spec.eig_lo = get_real(range[0], "model.eigen_range[0]");
      spec.eig_hi = get_real(range[1], "model.eigen_range[1]");
    }
  } else if (type == "logistic") {
    check_object(j, "model", {"type", "path", "prior_variance"});
    spec.kind = ModelKind::Logistic;
    if (j.contains("path")) spec.path = get_string(j["path"], "model.path");
    if (j.contains("prior_variance")) {
      spec.prior_variance = get_real(j["prior_variance"], "model.prior_variance");
    }
  } else {
    fail("model.type", "expected 'synthetic' or 'logistic', got '" + type + "'");
  }
  return spec;
}

void parse_optimizer(const json &j, RunConfig &config) {
  if (j.is_string()) {
    config.optimizer = get_enum(j, "optimizer", parse_optimizer_kind);
    return;
  }
  check_object(j, "optimizer", {"kind", "beta1", "beta2", "epsilon"});
  if (j.contains("kind")) config.optimizer = get_enum(j["kind"], "optimizer.kind", parse_optimizer_kind);
  if (j.contains("beta1")) config.hyper.beta1 = get_real(j["beta1"], "optimizer.beta1");
  if (j.contains("beta2")) config.hyper.beta2 = get_real(j["beta2"], "optimizer.beta2");
  if (j.contains("epsilon")) config.hyper.epsilon = get_real(j["epsilon"], "optimizer.epsilon");
}

void parse_policy(const json &j, LrPolicy &policy) {
  if (j.is_string()) {
    policy.kind = get_enum(j, "policy", parse_policy_kind);
    return;
  }
  if (!j.is_object() || !j.contains("kind")) {
    fail("policy", "expected a kind name or an object with a 'kind'");
  }
  policy.kind = get_enum(j["kind"], "policy.kind", parse_policy_kind);
  switch (policy.kind) {
  case PolicyKind::Static:
    check_object(j, "policy", {"kind"});
    break;
  case PolicyKind::PowerDecay:
    check_object(j, "policy", {"kind", "zeta"});
    if (j.contains("zeta")) policy.zeta = get_real(j["zeta"], "policy.zeta");
    break;
  case PolicyKind::Dlrd:
    check_object(j, "policy", {"kind", "alpha", "rho_min"});
    if (j.contains("alpha")) policy.dlrd.alpha = get_real(j["alpha"], "policy.alpha");
    if (j.contains("rho_min")) policy.dlrd.rho_min = get_real(j["rho_min"], "policy.rho_min");
    break;
  }
}

RunConfig from_json(const json &j) {
  check_object(j, "top level",
               {"name", "model", "family", "estimator", "optimizer", "policy", "eta0", "batch",
                "n_iter", "seed", "init", "metrics"});
  if (!j.contains("model")) {
    fail("top level", "missing 'model'");
  }
  RunConfig config;
  config.model = parse_model(j["model"]);
  if (j.contains("name")) config.name = get_string(j["name"], "name");
  if (j.contains("family")) config.family = get_enum(j["family"], "family", parse_family);
  if (j.contains("estimator")) {
    config.estimator = get_enum(j["estimator"], "estimator", parse_estimator);
  }
  if (j.contains("optimizer")) parse_optimizer(j["optimizer"], config);
  if (j.contains("policy")) parse_policy(j["policy"], config.policy);
  if (j.contains("eta0")) config.policy.eta0 = get_real(j["eta0"], "eta0");
  if (j.contains("batch")) config.batch = get_int(j["batch"], "batch");
  if (j.contains("n_iter")) config.n_iter = get_int(j["n_iter"], "n_iter");
  if (j.contains("seed")) config.seed = get_uint(j["seed"], "seed");
  if (j.contains("init")) {
    const json &init = j["init"];
    check_object(init, "init", {"mean_std", "log_std"});
    if (init.contains("mean_std")) config.init.mean_std = get_real(init["mean_std"], "init.mean_std");
    if (init.contains("log_std")) config.init.log_std = get_real(init["log_std"], "init.log_std");
  }
  if (j.contains("metrics")) {
    const json &m = j["metrics"];
    check_object(m, "metrics", {"path", "flush_interval", "stride", "wall_clock"});
    if (m.contains("path")) config.metrics.path = get_string(m["path"], "metrics.path");
    if (m.contains("flush_interval")) {
      config.metrics.flush_interval = get_int(m["flush_interval"], "metrics.flush_interval");
    }
    if (m.contains("stride")) config.metrics.stride = get_int(m["stride"], "metrics.stride");
    if (m.contains("wall_clock")) {
      config.metrics.wall_clock = get_bool(m["wall_clock"], "metrics.wall_clock");
    }
  }
  config.validate();
  return config;
}

} // namespace

Family parse_family(std::string_view name) {
  if (name == "meanfield") return Family::MeanField;
  if (name == "fullrank") return Family::FullRank;
  throw std::invalid_argument("unknown family '" + std::string(name) + "'");
}

std::string_view to_string(Family family) {
  return family == Family::MeanField ? "meanfield" : "fullrank";
}

Estimator parse_estimator(std::string_view name) {
  if (name == "stl") return Estimator::Stl;
  if (name == "pathwise_total") return Estimator::PathwiseTotal;
  if (name == "score") return Estimator::ScoreFunction;
  throw std::invalid_argument("unknown estimator '" + std::string(name) + "'");
}

std::string_view to_string(Estimator estimator) {
  switch (estimator) {
  case Estimator::Stl: return "stl";
  case Estimator::PathwiseTotal: return "pathwise_total";
  case Estimator::ScoreFunction: return "score";
  }
  return "unknown";
}

void RunConfig::validate() const {
  if (model.kind == ModelKind::Synthetic) {
    if (model.dim < 1) fail("model.dim", "must be positive");
    if (!(model.eig_lo > 0.0) || !(model.eig_hi >= model.eig_lo)) {
      fail("model.eigen_range", "need 0 < low <= high");
    }
  } else {
    if (model.path.empty()) fail("model.path", "a WDBC file is required (or --data)");
    if (!(model.prior_variance > 0.0)) fail("model.prior_variance", "must be positive");
  }
  if (!(hyper.beta1 >= 0.0 && hyper.beta1 < 1.0)) fail("optimizer.beta1", "must lie in [0, 1)");
  if (!(hyper.beta2 >= 0.0 && hyper.beta2 < 1.0)) fail("optimizer.beta2", "must lie in [0, 1)");
  if (!(hyper.epsilon > 0.0)) fail("optimizer.epsilon", "must be positive");
  try {
    policy.validate();
  } catch (const std::invalid_argument &e) {
    fail("policy", e.what());
  }
  if (batch < 1) fail("batch", "must be positive");
  if (n_iter < 1) fail("n_iter", "must be positive");
  if (!(init.mean_std >= 0.0) || !std::isfinite(init.mean_std)) {
    fail("init.mean_std", "must be non-negative");
  }
  if (!std::isfinite(init.log_std)) fail("init.log_std", "must be finite");
  if (metrics.flush_interval < 1) fail("metrics.flush_interval", "must be positive");
  if (metrics.stride < 1) fail("metrics.stride", "must be positive");
}

RunConfig parse_run_config(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error &e) {
    throw std::invalid_argument(std::string("config: invalid JSON: ") + e.what());
  }
  return from_json(j);
}

RunConfig load_run_config(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("config: cannot open '" + path.string() + "'");
  }
  std::ostringstream text;
  text << in.rdbuf();
  RunConfig config = parse_run_config(text.str());
  if (config.name.empty()) {
    config.name = path.stem().string();
  }
  return config;
}

std::string to_json_string(const RunConfig &config) {
  json j;
  j["name"] = config.name;
  if (config.model.kind == ModelKind::Synthetic) {
    j["model"] = {{"type", "synthetic"},
                  {"dim", config.model.dim},
                  {"seed", config.model.seed},
                  {"eigen_range", {config.model.eig_lo, config.model.eig_hi}}};
  } else {
    j["model"] = {{"type", "logistic"},
                  {"path", config.model.path},
                  {"prior_variance", config.model.prior_variance}};
  }
  j["family"] = to_string(config.family);
  j["estimator"] = to_string(config.estimator);
  j["optimizer"] = {{"kind", to_string(config.optimizer)},
                    {"beta1", config.hyper.beta1},
                    {"beta2", config.hyper.beta2},
                    {"epsilon", config.hyper.epsilon}};
  json policy = {{"kind", to_string(config.policy.kind)}};
  if (config.policy.kind == PolicyKind::PowerDecay) {
    policy["zeta"] = config.policy.zeta;
  } else if (config.policy.kind == PolicyKind::Dlrd) {
    policy["alpha"] = config.policy.dlrd.alpha;
    policy["rho_min"] = config.policy.dlrd.rho_min;
  }
  j["policy"] = policy;
  j["eta0"] = config.policy.eta0;
  j["batch"] = config.batch;
  j["n_iter"] = config.n_iter;
  j["seed"] = config.seed;
  j["init"] = {{"mean_std", config.init.mean_std}, {"log_std", config.init.log_std}};
  j["metrics"] = {{"path", config.metrics.path},
                  {"flush_interval", config.metrics.flush_interval},
                  {"stride", config.metrics.stride},
                  {"wall_clock", config.metrics.wall_clock}};
  return j.dump(2);
}

void apply_overrides(RunConfig &config, const ConfigOverrides &overrides) {
  if (overrides.seed) config.seed = *overrides.seed;
  if (overrides.out) config.metrics.path = *overrides.out;
  if (overrides.iters) config.n_iter = *overrides.iters;
  if (overrides.eta0) config.policy.eta0 = *overrides.eta0;
  if (overrides.policy) {
    try {
      config.policy.kind = parse_policy_kind(*overrides.policy);
    } catch (const std::invalid_argument &e) {
      fail("--policy", e.what());
    }
  }
  if (overrides.data) {
    // Points the run at a WDBC file, switching a synthetic config to logistic.
    if (config.model.kind != ModelKind::Logistic) {
      config.model = ModelSpec{};
      config.model.kind = ModelKind::Logistic;
    }
    config.model.path = *overrides.data;
  }
  config.validate();
}

} // namespace svi
