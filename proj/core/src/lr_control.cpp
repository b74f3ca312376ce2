#include "svi/lr_control.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace svi {

using Eigen::Index;
using Eigen::VectorXd;

SnrWindow::SnrWindow(Index size) : a_(size, 0.0L), b_(size, 0.0L), c_(size, 0.0L) {
  if (size < 1) {
    throw std::invalid_argument("SnrWindow: size must be positive");
  }
}

void SnrWindow::reset() {
  k_ = -1;
  std::fill(a_.begin(), a_.end(), 0.0L);
  std::fill(b_.begin(), b_.end(), 0.0L);
  std::fill(c_.begin(), c_.end(), 0.0L);
}

void SnrWindow::accumulate(const VectorXd &lambda) {
  if (lambda.size() != size()) {
    throw std::invalid_argument("SnrWindow::accumulate: expected " +
                                std::to_string(size()) + " parameters, got " +
                                std::to_string(lambda.size()));
  }
  if (!lambda.allFinite()) {
    throw std::invalid_argument("SnrWindow::accumulate: parameters are not finite");
  }
  ++k_;
  if (k_ == 0) {
    offset_ = lambda;
  }
  const long double j = static_cast<long double>(k_);
  for (Index p = 0; p < size(); ++p) {
    const long double x =
        static_cast<long double>(lambda[p]) - static_cast<long double>(offset_[p]);
    a_[p] += x;
    b_[p] += x * x;
    c_[p] += j * x;
  }
}

VectorXd SnrWindow::rho() const {
  if (k_ < 2) {
    throw std::logic_error("SnrWindow::rho: need at least three points (k >= 2)");
  }
  const long double k = static_cast<long double>(k_);
  const long double factor = k * (k + 1.0L) * (k + 2.0L) / 12.0L;
  VectorXd rho(size());
  for (Index p = 0; p < size(); ++p) {
    const long double spread = b_[p] - a_[p] * a_[p] / (k + 1.0L);
    const long double slope = c_[p] - 0.5L * k * a_[p];
    if (!(spread > 0.0L)) {
      rho[p] = std::numeric_limits<double>::quiet_NaN();
    } else if (slope == 0.0L) {
      rho[p] = 0.0;
    } else {
      const long double bracket = factor * spread / (slope * slope) - 1.0L;
      rho[p] = bracket > 0.0L ? static_cast<double>(1.0L / bracket)
                              : std::numeric_limits<double>::infinity();
    }
  }
  return rho;
}

std::optional<double> mean_snr(const VectorXd &rho) {
  double sum = 0.0;
  Index count = 0;
  for (const double r : rho) {
    if (std::isnan(r)) {
      continue;
    }
    sum += r;
    ++count;
  }
  if (count == 0) {
    return std::nullopt;
  }
  return sum / static_cast<double>(count);
}

double decayed_eta(double eta0, double alpha, std::int64_t decays) {
  return eta0 * std::pow(alpha, static_cast<double>(decays));
}

DlrdController::DlrdController(double eta0, Index size, DlrdSettings settings)
    : eta0_(eta0), eta_(eta0), settings_(settings), window_(size) {
  if (!(eta0 > 0.0)) {
    throw std::invalid_argument("DlrdController: eta0 must be positive");
  }
  if (!(settings.alpha > 0.0 && settings.alpha < 1.0) || !(settings.rho_min > 0.0)) {
    throw std::invalid_argument("DlrdController: need alpha in (0, 1) and rho_min > 0");
  }
}

LrDecision DlrdController::step(const VectorXd &lambda) {
  window_.accumulate(lambda);
  LrDecision decision;
  if (window_.k() >= k_min_) {
    decision.mean_rho = mean_snr(window_.rho());
    if (decision.mean_rho && *decision.mean_rho < settings_.rho_min) {
      ++decay_count_;
      eta_ = decayed_eta(eta0_, settings_.alpha, decay_count_);
      k_min_ = window_.k();
      window_.reset();
      decision.decayed = true;
    }
  }
  decision.eta = eta_;
  return decision;
}

PolicyKind parse_policy_kind(std::string_view name) {
  if (name == "static") return PolicyKind::Static;
  if (name == "power") return PolicyKind::PowerDecay;
  if (name == "dlrd") return PolicyKind::Dlrd;
  throw std::invalid_argument("unknown learning-rate policy '" + std::string(name) + "'");
}

std::string_view to_string(PolicyKind kind) {
  switch (kind) {
  case PolicyKind::Static: return "static";
  case PolicyKind::PowerDecay: return "power";
  case PolicyKind::Dlrd: return "dlrd";
  }
  return "unknown";
}

void LrPolicy::validate() const {
  if (!(eta0 > 0.0) || !std::isfinite(eta0)) {
    throw std::invalid_argument("learning-rate policy: eta0 must be positive");
  }
  if (kind == PolicyKind::PowerDecay && !(zeta > 0.0 && zeta <= 1.0)) {
    throw std::invalid_argument("power policy: zeta must lie in (0, 1]");
  }
  if (kind == PolicyKind::Dlrd &&
      (!(dlrd.alpha > 0.0 && dlrd.alpha < 1.0) || !(dlrd.rho_min > 0.0))) {
    throw std::invalid_argument("dlrd policy: need alpha in (0, 1) and rho_min > 0");
  }
}

double schedule_eta(const LrPolicy &policy, std::int64_t i) {
  if (i < 0) {
    throw std::invalid_argument("schedule_eta: negative iteration");
  }
  switch (policy.kind) {
  case PolicyKind::Static:
    return policy.eta0;
  case PolicyKind::PowerDecay:
    // Shifted by one: the unshifted schedule is undefined at i = 0.
    return policy.eta0 / std::pow(static_cast<double>(i) + 1.0, policy.zeta);
  case PolicyKind::Dlrd:
    break;
  }
  throw std::logic_error("schedule_eta: dlrd rates come from DlrdController");
}

LrController::LrController(const LrPolicy &policy, Index size) : policy_(policy) {
  policy_.validate();
  if (policy_.kind == PolicyKind::Dlrd) {
    dlrd_.emplace(policy_.eta0, size, policy_.dlrd);
  }
}

LrDecision LrController::next(std::int64_t i, const VectorXd &lambda) {
  if (dlrd_) {
    return dlrd_->step(lambda);
  }
  LrDecision decision;
  decision.eta = schedule_eta(policy_, i);
  return decision;
}

} // namespace svi
