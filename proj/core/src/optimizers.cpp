#include "svi/optimizers.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace svi {

using Eigen::VectorXd;

OptimizerKind parse_optimizer_kind(std::string_view name) {
  if (name == "sgd") return OptimizerKind::Sgd;
  if (name == "adagrad") return OptimizerKind::Adagrad;
  if (name == "rmsprop") return OptimizerKind::RmsProp;
  if (name == "adam") return OptimizerKind::Adam;
  if (name == "adamax") return OptimizerKind::AdaMax;
  throw std::invalid_argument("unknown optimizer '" + std::string(name) + "'");
}

std::string_view to_string(OptimizerKind kind) {
  switch (kind) {
  case OptimizerKind::Sgd: return "sgd";
  case OptimizerKind::Adagrad: return "adagrad";
  case OptimizerKind::RmsProp: return "rmsprop";
  case OptimizerKind::Adam: return "adam";
  case OptimizerKind::AdaMax: return "adamax";
  }
  return "unknown";
}

Optimizer::Optimizer(OptimizerKind kind, Eigen::Index size, OptimizerHyper hyper)
    : kind_(kind), hyper_(hyper), size_(size) {
  if (size < 1) {
    throw std::invalid_argument("Optimizer: size must be positive");
  }
  if (!(hyper.beta1 >= 0.0 && hyper.beta1 < 1.0) ||
      !(hyper.beta2 >= 0.0 && hyper.beta2 < 1.0) || !(hyper.epsilon >= 0.0)) {
    throw std::invalid_argument("Optimizer: betas must lie in [0, 1), epsilon >= 0");
  }
  reset();
}

void Optimizer::reset() {
  step_count_ = 0;
  h_ = VectorXd::Zero(size_);
  m_ = VectorXd::Zero(size_);
  v_ = VectorXd::Zero(size_);
  u_ = VectorXd::Zero(size_);
}

VectorXd Optimizer::step(double eta, const VectorXd &lambda, const VectorXd &grad) {
  if (!(eta > 0.0) || !std::isfinite(eta)) {
    throw std::invalid_argument("Optimizer::step: learning rate must be positive");
  }
  if (lambda.size() != size_ || grad.size() != size_) {
    throw std::invalid_argument("Optimizer::step: length mismatch");
  }
  if (!grad.allFinite()) {
    throw std::invalid_argument("Optimizer::step: gradient is not finite");
  }
  ++step_count_;
  const double i = static_cast<double>(step_count_);
  const auto [beta1, beta2, eps] = hyper_;

  switch (kind_) {
  case OptimizerKind::Sgd:
    return lambda + eta * grad;

  case OptimizerKind::Adagrad:
    h_.array() += grad.array().square();
    return lambda + (eta * grad.array() / (h_.array() + eps).sqrt()).matrix();

  case OptimizerKind::RmsProp:
    v_ = beta2 * v_ + (1.0 - beta2) * grad.cwiseAbs2();
    return lambda + (eta * grad.array() / (v_.array() + eps).sqrt()).matrix();

  case OptimizerKind::Adam: {
    m_ = beta1 * m_ + (1.0 - beta1) * grad;
    v_ = beta2 * v_ + (1.0 - beta2) * grad.cwiseAbs2();
    const auto m_hat = m_.array() / (1.0 - std::pow(beta1, i));
    const auto v_hat = v_.array() / (1.0 - std::pow(beta2, i));
    return lambda + (eta * m_hat / (v_hat + eps).sqrt()).matrix();
  }

  case OptimizerKind::AdaMax: {
    m_ = beta1 * m_ + (1.0 - beta1) * grad;
    u_ = (beta2 * u_).cwiseMax(grad.cwiseAbs());
    const double rate = eta / (1.0 - std::pow(beta1, i));
    return lambda + (rate * m_.array() / u_.array().max(eps)).matrix();
  }
  }
  throw std::logic_error("Optimizer::step: unknown kind");
}

} // namespace svi
