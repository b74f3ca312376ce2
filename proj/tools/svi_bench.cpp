// svi_bench: run or compare stochastic variational inference experiments.
//
//   svi_bench run config.json [--seed N] [--out metrics.csv] [--iters N]
//                             [--eta0 X] [--policy static|power|dlrd] [--data wdbc.data]
//   svi_bench compare a.json b.json ... [--out DIR] [--summary table.csv] [same flags]

#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "svi/config.hpp"
#include "svi/metrics.hpp"
#include "svi/runner.hpp"

namespace {

void add_override_flags(CLI::App &cmd, svi::ConfigOverrides &o, bool wall_clock_flag,
                        bool &wall_clock) {
  cmd.add_option("--seed", o.seed, "Run seed");
  cmd.add_option("--iters", o.iters, "Number of iterations");
  cmd.add_option("--eta0", o.eta0, "Initial base learning rate");
  cmd.add_option("--policy", o.policy, "Learning-rate policy: static, power or dlrd");
  cmd.add_option("--data", o.data, "WDBC data file (selects the logistic model)");
  if (wall_clock_flag) {
    cmd.add_flag("--wall-clock", wall_clock, "Record wall-clock nanoseconds per row");
  }
}

void print_run_summary(const svi::RunConfig &config, const svi::RunResult &result) {
  const auto summary = svi::summarize_final_window(result.records);
  std::cout << "name: " << config.name << '\n'
            << "iterations: " << config.n_iter << '\n'
            << "decays: " << result.decays << '\n'
            << "final_eta: " << svi::format_real(result.final_eta) << '\n'
            << "final_window_elbo: " << svi::format_real(summary.elbo) << '\n';
  if (summary.jeffreys) {
    std::cout << "final_window_jeffreys: " << svi::format_real(*summary.jeffreys) << '\n';
  }
  if (!config.metrics.path.empty()) {
    std::cout << "metrics: " << config.metrics.path << '\n';
  }
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Stochastic variational inference with dynamic learning-rate decay"};
  app.require_subcommand(1);

  svi::ConfigOverrides run_overrides;
  std::string run_config_path;
  bool run_wall_clock = false;
  auto *run_cmd = app.add_subcommand("run", "Run one configuration");
  run_cmd->add_option("config", run_config_path, "JSON run configuration")->required();
  run_cmd->add_option("--out", run_overrides.out, "Metrics CSV path");
  add_override_flags(*run_cmd, run_overrides, true, run_wall_clock);

  svi::ConfigOverrides cmp_overrides;
  std::vector<std::string> cmp_paths;
  std::optional<std::string> cmp_out_dir;
  std::optional<std::string> cmp_summary;
  bool cmp_wall_clock = false;
  auto *cmp_cmd = app.add_subcommand("compare", "Run several configurations on one model");
  cmp_cmd->add_option("configs", cmp_paths, "JSON run configurations")->required()->expected(2, -1);
  cmp_cmd->add_option("--out", cmp_out_dir, "Directory for per-run metrics files");
  cmp_cmd->add_option("--summary", cmp_summary, "Write the summary table here instead of stdout");
  add_override_flags(*cmp_cmd, cmp_overrides, true, cmp_wall_clock);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) {
      svi::RunConfig config = svi::load_run_config(run_config_path);
      svi::apply_overrides(config, run_overrides);
      config.metrics.wall_clock = config.metrics.wall_clock || run_wall_clock;
      const svi::RunResult result = svi::run(config);
      print_run_summary(config, result);
      return 0;
    }

    std::vector<svi::RunConfig> configs;
    for (const auto &path : cmp_paths) {
      svi::RunConfig config = svi::load_run_config(path);
      svi::apply_overrides(config, cmp_overrides);
      config.metrics.wall_clock = config.metrics.wall_clock || cmp_wall_clock;
      if (cmp_out_dir) {
        std::filesystem::create_directories(*cmp_out_dir);
        config.metrics.path = (std::filesystem::path(*cmp_out_dir) / (config.name + ".csv")).string();
      }
      configs.push_back(std::move(config));
    }
    const std::string table = svi::format_summary(svi::compare(configs));
    if (cmp_summary) {
      std::ofstream out(*cmp_summary);
      out << table;
      if (!out) {
        throw std::runtime_error("cannot write summary '" + *cmp_summary + "'");
      }
    } else {
      std::cout << table;
    }
    return 0;
  } catch (const std::exception &e) {
    std::cerr << "svi_bench: " << e.what() << '\n';
    return 1;
  }
}
