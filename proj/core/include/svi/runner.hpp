#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "svi/config.hpp"
#include "svi/estimators.hpp"
#include "svi/gaussian.hpp"
#include "svi/lr_control.hpp"
#include "svi/metrics.hpp"

namespace svi {

/// A joint model plus, when known, its optimal variational distribution.
struct ModelBundle {
  std::shared_ptr<const JointModel> model;
  std::optional<GaussianVariational> reference;
};

ModelBundle build_model(const ModelSpec &spec);

/**
 * The iteration protocol shared by every run:
 *
 *   decision = lr.next(i, lambda_i)     accumulate, gate check, maybe decay
 *   lambda_{i+1} = step(i, eta_i, lambda_i)
 *   observe(i, decision, lambda_i)
 *
 * so the step at iteration i always uses the rate decided at iteration i.
 * Returns lambda after n_iter steps.
 */
template <class Step, class Observe>
VectorXd drive_iterations(LrController &lr, VectorXd lambda, std::int64_t n_iter, Step &&step,
                          Observe &&observe) {
  for (std::int64_t i = 0; i < n_iter; ++i) {
    const LrDecision decision = lr.next(i, lambda);
    VectorXd next = step(i, decision.eta, lambda);
    observe(i, decision, lambda);
    lambda = std::move(next);
  }
  return lambda;
}

/// Initial variational distribution: means N(0, mean_std^2) from `seed`,
/// log standard deviations at init.log_std, FullRank off-diagonals zero.
GaussianVariational initial_q(const RunConfig &config, Index dim);

struct RunResult {
  GaussianVariational final_q;
  /// Rows that were recorded (every stride-th iteration).
  std::vector<IterationRecord> records;
  std::int64_t decays = 0;
  double final_eta = 0.0;
};

/// Errors raised by a run, tagged with the iteration that failed.
class RunAborted : public std::runtime_error {
public:
  RunAborted(const std::string &what, std::int64_t iteration)
      : std::runtime_error("iteration " + std::to_string(iteration) + ": " + what),
        iteration_(iteration) {}

  std::int64_t iteration() const { return iteration_; }

private:
  std::int64_t iteration_;
};

/// Runs one configuration against a prebuilt model. Rows are also streamed
/// to `metrics` when given.
RunResult run(const RunConfig &config, const ModelBundle &bundle,
              std::ostream *metrics = nullptr);

/// Builds the model and writes metrics to config.metrics.path when set.
RunResult run(const RunConfig &config);

/// Means over the last `fraction` of the recorded rows (at least one row).
struct WindowSummary {
  std::optional<double> jeffreys;
  double elbo = 0.0;
  std::size_t rows = 0;
};

WindowSummary summarize_final_window(const std::vector<IterationRecord> &records,
                                     double fraction = 0.1);

struct CompareRow {
  std::string name;
  RunConfig config;
  WindowSummary summary;
  std::int64_t decays = 0;
  double final_eta = 0.0;
};

/**
 * Runs configurations that share one model, in parallel, each writing its
 * own metrics file. Rows come back in input order.
 */
std::vector<CompareRow> compare(const std::vector<RunConfig> &configs);

/// CSV table of compare rows.
std::string format_summary(const std::vector<CompareRow> &rows);

} // namespace svi
