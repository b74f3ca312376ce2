#include "svi/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <future>
#include <sstream>
#include <stdexcept>

#include "svi/models.hpp"
#include "svi/optimizers.hpp"
#include "svi/rng.hpp"

namespace svi {

namespace {

constexpr std::uint32_t kInitStream = 0;
constexpr std::uint32_t kNoiseStream = 1;

} // namespace

ModelBundle build_model(const ModelSpec &spec) {
  ModelBundle bundle;
  if (spec.kind == ModelKind::Synthetic) {
    auto model = std::make_shared<const SyntheticQuartic>(
        SyntheticQuartic::generate(spec.dim, spec.seed, spec.eig_lo, spec.eig_hi));
    bundle.reference = model->optimal_q();
    bundle.model = std::move(model);
  } else {
    bundle.model =
        std::make_shared<const LogisticRegression>(load_wdbc(spec.path, spec.prior_variance));
  }
  return bundle;
}

GaussianVariational initial_q(const RunConfig &config, Index dim) {
  Rng rng = Rng(config.seed).split(kInitStream);
  VectorXd mean(dim);
  for (Index i = 0; i < dim; ++i) {
    mean[i] = config.init.mean_std * rng.normal();
  }
  if (config.family == Family::MeanField) {
    return GaussianVariational::mean_field(std::move(mean),
                                           VectorXd::Constant(dim, config.init.log_std));
  }
  MatrixXd raw = MatrixXd::Zero(dim, dim);
  raw.diagonal().setConstant(config.init.log_std);
  return GaussianVariational::full_rank(std::move(mean), raw);
}

RunResult run(const RunConfig &config, const ModelBundle &bundle, std::ostream *metrics) {
  config.validate();
  const JointModel &model = *bundle.model;
  const Index dim = model.dim();
  const Family family = config.family;
  if (bundle.reference && bundle.reference->dim() != dim) {
    throw std::invalid_argument("run: reference distribution has the wrong dimension");
  }

  const GaussianVariational q0 = initial_q(config, dim);
  const Index size = flat_size(family, dim);
  Optimizer optimizer(config.optimizer, size, config.hyper);
  LrController lr(config.policy, size);
  Rng noise = Rng(config.seed).split(kNoiseStream);

  std::optional<MetricsWriter> writer;
  if (metrics) {
    writer.emplace(*metrics, config.metrics.flush_interval);
  }

  RunResult result{q0, {}, 0, config.policy.eta0};
  result.records.reserve(
      static_cast<std::size_t>((config.n_iter + config.metrics.stride - 1) / config.metrics.stride));

  const auto start = std::chrono::steady_clock::now();
  double elbo = 0.0;
  bool decayed_since_row = false;

  const auto step = [&](std::int64_t i, double eta, const VectorXd &lambda) {
    const auto q = GaussianVariational::from_flat(family, dim, lambda);
    const MatrixXd eps = sample_eps(dim, config.batch, noise);
    GradEstimate estimate;
    try {
      estimate = estimate_gradient(config.estimator, model, q, eps);
    } catch (const NonFiniteError &e) {
      throw RunAborted(e.what(), i);
    }
    if (!std::isfinite(estimate.elbo_estimate)) {
      throw RunAborted("ELBO estimate is not finite", i);
    }
    elbo = estimate.elbo_estimate;
    return optimizer.step(eta, lambda, estimate.grad);
  };

  const auto observe = [&](std::int64_t i, const LrDecision &decision, const VectorXd &lambda) {
    if (decision.decayed) {
      ++result.decays;
      decayed_since_row = true;
    }
    result.final_eta = decision.eta;
    if (i % config.metrics.stride != 0) {
      return;
    }
    IterationRecord record;
    record.iter = i;
    record.eta = decision.eta;
    record.elbo_estimate = elbo;
    record.mean_snr = decision.mean_rho;
    record.decayed = decayed_since_row;
    decayed_since_row = false;
    if (bundle.reference) {
      const auto q = GaussianVariational::from_flat(family, dim, lambda);
      record.jeffreys_to_opt = jeffreys(*bundle.reference, q.marginals());
    }
    if (config.metrics.wall_clock) {
      record.wall_nanos = std::chrono::duration_cast<std::chrono::nanoseconds>(
                              std::chrono::steady_clock::now() - start)
                              .count();
    }
    if (writer) {
      writer->write(record);
    }
    result.records.push_back(record);
  };

  const VectorXd final_lambda = drive_iterations(lr, q0.to_flat(), config.n_iter, step, observe);
  if (writer) {
    writer->flush();
  }
  result.final_q = GaussianVariational::from_flat(family, dim, final_lambda);
  return result;
}

RunResult run(const RunConfig &config) {
  config.validate();
  const ModelBundle bundle = build_model(config.model);
  if (config.metrics.path.empty()) {
    return run(config, bundle, nullptr);
  }
  std::ofstream out(config.metrics.path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::runtime_error("cannot open metrics file '" + config.metrics.path + "'");
  }
  return run(config, bundle, &out);
}

WindowSummary summarize_final_window(const std::vector<IterationRecord> &records,
                                     double fraction) {
  WindowSummary summary;
  if (records.empty()) {
    return summary;
  }
  const auto n = records.size();
  auto count = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n)));
  count = std::clamp<std::size_t>(count, 1, n);
  double elbo = 0.0;
  double jeff = 0.0;
  bool have_jeffreys = true;
  for (std::size_t r = n - count; r < n; ++r) {
    elbo += records[r].elbo_estimate;
    if (records[r].jeffreys_to_opt) {
      jeff += *records[r].jeffreys_to_opt;
    } else {
      have_jeffreys = false;
    }
  }
  summary.rows = count;
  summary.elbo = elbo / static_cast<double>(count);
  if (have_jeffreys) {
    summary.jeffreys = jeff / static_cast<double>(count);
  }
  return summary;
}

std::vector<CompareRow> compare(const std::vector<RunConfig> &configs) {
  if (configs.size() < 2) {
    throw std::invalid_argument("compare: need at least two configurations");
  }
  for (const auto &c : configs) {
    c.validate();
    if (!(c.model == configs.front().model)) {
      throw std::invalid_argument("compare: configuration '" + c.name +
                                  "' uses a different model than '" + configs.front().name +
                                  "'");
    }
  }
  const ModelBundle bundle = build_model(configs.front().model);

  std::vector<std::future<RunResult>> pending;
  pending.reserve(configs.size());
  for (const auto &config : configs) {
    pending.push_back(std::async(std::launch::async, [&bundle, &config] {
      if (config.metrics.path.empty()) {
        return run(config, bundle, nullptr);
      }
      std::ofstream out(config.metrics.path, std::ios::binary | std::ios::trunc);
      if (!out) {
        throw std::runtime_error("cannot open metrics file '" + config.metrics.path + "'");
      }
      return run(config, bundle, &out);
    }));
  }

  std::vector<CompareRow> rows;
  rows.reserve(configs.size());
  for (std::size_t i = 0; i < configs.size(); ++i) {
    const RunResult result = pending[i].get();
    rows.push_back({configs[i].name, configs[i], summarize_final_window(result.records),
                    result.decays, result.final_eta});
  }
  return rows;
}

std::string format_summary(const std::vector<CompareRow> &rows) {
  std::ostringstream out;
  out << "name,optimizer,policy,eta0,batch,n_iter,seed,decays,final_eta,"
         "final_window_jeffreys,final_window_elbo\n";
  for (const auto &row : rows) {
    const RunConfig &c = row.config;
    out << row.name << ',' << to_string(c.optimizer) << ',' << to_string(c.policy.kind) << ','
        << format_real(c.policy.eta0) << ',' << c.batch << ',' << c.n_iter << ',' << c.seed
        << ',' << row.decays << ',' << format_real(row.final_eta) << ',';
    if (row.summary.jeffreys) {
      out << format_real(*row.summary.jeffreys);
    }
    out << ',' << format_real(row.summary.elbo) << '\n';
  }
  return out.str();
}

} // namespace svi
