#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "svi/estimators.hpp"
#include "svi/gaussian.hpp"
#include "svi/lr_control.hpp"
#include "svi/optimizers.hpp"

namespace svi {

enum class ModelKind { Synthetic, Logistic };

struct ModelSpec {
  ModelKind kind = ModelKind::Synthetic;
  // synthetic
  Index dim = 10;
  std::uint64_t seed = 1;
  double eig_lo = 0.1;
  double eig_hi = 10.0;
  // logistic
  std::string path;
  double prior_variance = 100.0;

  bool operator==(const ModelSpec &) const = default;
};

struct InitSpec {
  /// Initial means are N(0, mean_std^2); zero gives all-zero means.
  double mean_std = 1.0;
  double log_std = 0.0;
};

struct MetricsSpec {
  std::string path; // empty: no file
  std::int64_t flush_interval = 1000;
  std::int64_t stride = 1;
  /// Off by default so metrics files are byte-reproducible.
  bool wall_clock = false;
};

struct RunConfig {
  std::string name;
  ModelSpec model;
  Family family = Family::MeanField;
  Estimator estimator = Estimator::Stl;
  OptimizerKind optimizer = OptimizerKind::Adam;
  OptimizerHyper hyper;
  LrPolicy policy; // eta0 lives here
  std::int64_t batch = 2;
  std::int64_t n_iter = 10000;
  std::uint64_t seed = 0;
  InitSpec init;
  MetricsSpec metrics;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

/**
 * Parses a JSON run configuration. Example:
 *
 *   {"name": "adam-dlrd",
 *    "model": {"type": "synthetic", "dim": 10, "seed": 1, "eigen_range": [0.1, 10]},
 *    "family": "meanfield", "estimator": "stl",
 *    "optimizer": {"kind": "adam", "beta1": 0.9, "beta2": 0.999, "epsilon": 1e-8},
 *    "policy": {"kind": "dlrd", "alpha": 0.1, "rho_min": 1},
 *    "eta0": 0.01, "batch": 2, "n_iter": 50000, "seed": 7,
 *    "init": {"mean_std": 1, "log_std": 0},
 *    "metrics": {"path": "adam-dlrd.csv", "flush_interval": 1000, "stride": 1,
 *                "wall_clock": false}}
 *
 * Every key is optional except model.type; unknown keys are rejected.
 */
RunConfig parse_run_config(std::string_view json_text);
RunConfig load_run_config(const std::filesystem::path &path);
std::string to_json_string(const RunConfig &config);

/// Values given on the command line; each replaces the config value.
struct ConfigOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::int64_t> iters;
  std::optional<double> eta0;
  std::optional<std::string> policy;
  std::optional<std::string> data;
};

void apply_overrides(RunConfig &config, const ConfigOverrides &overrides);

Family parse_family(std::string_view name);
std::string_view to_string(Family family);
Estimator parse_estimator(std::string_view name);
std::string_view to_string(Estimator estimator);

} // namespace svi
