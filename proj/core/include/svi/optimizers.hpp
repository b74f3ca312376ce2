#pragma once

#include <cstdint>
#include <string_view>

#include <Eigen/Core>

namespace svi {

enum class OptimizerKind { Sgd, Adagrad, RmsProp, Adam, AdaMax };

OptimizerKind parse_optimizer_kind(std::string_view name);
std::string_view to_string(OptimizerKind kind);

struct OptimizerHyper {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/**
 * Stochastic gradient ascent with per-coordinate adaptive scaling.
 *
 * epsilon sits inside the square root for Adagrad, RMSProp and Adam:
 *   lambda + eta * g / sqrt(h + eps)
 * RMSProp keeps no bias correction. AdaMax bias-corrects the first moment
 * only and floors the infinity-norm accumulator at epsilon.
 *
 * step() mutates the accumulators; the learning rate is passed per call so a
 * scheduler can change it without touching the moments.
 */
class Optimizer {
public:
  Optimizer(OptimizerKind kind, Eigen::Index size, OptimizerHyper hyper = {});

  /// Returns lambda after one ascent step along grad.
  Eigen::VectorXd step(double eta, const Eigen::VectorXd &lambda,
                       const Eigen::VectorXd &grad);

  /// Zeroes all accumulators and the step counter.
  void reset();

  OptimizerKind kind() const { return kind_; }
  const OptimizerHyper &hyper() const { return hyper_; }
  Eigen::Index size() const { return size_; }
  std::int64_t step_count() const { return step_count_; }

  const Eigen::VectorXd &h() const { return h_; }
  const Eigen::VectorXd &m() const { return m_; }
  const Eigen::VectorXd &v() const { return v_; }
  const Eigen::VectorXd &u() const { return u_; }

private:
  OptimizerKind kind_;
  OptimizerHyper hyper_;
  Eigen::Index size_;
  std::int64_t step_count_ = 0;
  Eigen::VectorXd h_; // Adagrad: running sum of squared gradients
  Eigen::VectorXd m_; // Adam, AdaMax: first moment
  Eigen::VectorXd v_; // RMSProp, Adam: second moment
  Eigen::VectorXd u_; // AdaMax: infinity norm
};

} // namespace svi
