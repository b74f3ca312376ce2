#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace svi {

/**
 * Streaming least-squares fit of each parameter against its index j within
 * the current window.
 *
 * Holds a = sum x_j, b = sum x_j^2 and c = sum j x_j where x_j is the
 * parameter vector minus the first vector of the window. The shift leaves the
 * SNR unchanged and keeps b - a^2/(k+1) from cancelling when the parameters
 * are large compared with their spread. Sums are kept in long double.
 */
class SnrWindow {
public:
  explicit SnrWindow(Eigen::Index size);

  /// Advances k, then adds lambda to the sums.
  void accumulate(const Eigen::VectorXd &lambda);
  /// Empties the window; the next accumulate captures a new offset.
  void reset();

  /**
   * Per-parameter SNR rho = [k(k+1)(k+2)/12 (b - a^2/(k+1)) / (c - k a/2)^2 - 1]^-1.
   *
   * Degenerate components: zero spread gives NaN (excluded from the mean),
   * zero slope with positive spread gives 0, and a bracket that rounds to
   * zero or below gives +inf. Requires k >= 2.
   */
  Eigen::VectorXd rho() const;

  /// Window index of the latest point; -1 when empty.
  std::int64_t k() const { return k_; }
  Eigen::Index size() const { return static_cast<Eigen::Index>(a_.size()); }
  const std::vector<long double> &a() const { return a_; }
  const std::vector<long double> &b() const { return b_; }
  const std::vector<long double> &c() const { return c_; }
  const Eigen::VectorXd &offset() const { return offset_; }

private:
  std::int64_t k_ = -1;
  std::vector<long double> a_, b_, c_;
  Eigen::VectorXd offset_;
};

/// Mean of the finite-or-infinite components; NaN entries are skipped.
/// Empty when every component is NaN. Any +inf makes the mean +inf.
std::optional<double> mean_snr(const Eigen::VectorXd &rho);

struct DlrdSettings {
  double alpha = 0.1;
  double rho_min = 1.0;
};

struct LrDecision {
  double eta = 0.0;
  bool decayed = false;
  std::optional<double> mean_rho;
};

/**
 * Dynamic learning-rate decay.
 *
 * Each iteration: accumulate lambda_i; once k >= k_min, compare the mean SNR
 * with rho_min. On a decay, eta <- alpha * eta, k_min <- k and the window is
 * emptied, so the next check needs one more point than the last window held.
 */
class DlrdController {
public:
  DlrdController(double eta0, Eigen::Index size, DlrdSettings settings = {});

  LrDecision step(const Eigen::VectorXd &lambda);

  double eta() const { return eta_; }
  double eta0() const { return eta0_; }
  std::int64_t decay_count() const { return decay_count_; }
  std::int64_t k_min() const { return k_min_; }
  const SnrWindow &window() const { return window_; }
  const DlrdSettings &settings() const { return settings_; }

private:
  double eta0_;
  double eta_;
  DlrdSettings settings_;
  std::int64_t k_min_ = 2;
  std::int64_t decay_count_ = 0;
  SnrWindow window_;
};

/// eta0 * alpha^decays, the value the controller holds after `decays` decays.
double decayed_eta(double eta0, double alpha, std::int64_t decays);

enum class PolicyKind { Static, PowerDecay, Dlrd };

PolicyKind parse_policy_kind(std::string_view name);
std::string_view to_string(PolicyKind kind);

struct LrPolicy {
  PolicyKind kind = PolicyKind::Static;
  double eta0 = 1e-2;
  double zeta = 1.0;        // PowerDecay
  DlrdSettings dlrd;        // Dlrd

  /// Throws std::invalid_argument on out-of-range parameters.
  void validate() const;
};

/// Static: eta0. PowerDecay: eta0 / (i + 1)^zeta. Throws for Dlrd.
double schedule_eta(const LrPolicy &policy, std::int64_t i);

/// Per-iteration learning rate for any policy kind.
class LrController {
public:
  LrController(const LrPolicy &policy, Eigen::Index size);

  LrDecision next(std::int64_t i, const Eigen::VectorXd &lambda);

  const LrPolicy &policy() const { return policy_; }
  /// Present for Dlrd policies.
  const std::optional<DlrdController> &dlrd() const { return dlrd_; }

private:
  LrPolicy policy_;
  std::optional<DlrdController> dlrd_;
};

} // namespace svi
