#pragma once

#include <cstdint>
#include <filesystem>

#include "svi/estimators.hpp"
#include "svi/gaussian.hpp"

namespace svi {

/**
 * log p(z) = -1/2 sum_i ((z_i - mu_i) / sigma_i)^4 - 1/2 (z - mu)^T Lambda (z - mu)
 *
 * A quartic (generalized normal) penalty times an unnormalized Gaussian. The
 * best mean-field Gaussian approximation is known in closed form.
 */
class SyntheticQuartic final : public JointModel {
public:
  SyntheticQuartic(VectorXd mu, VectorXd sigma, MatrixXd precision);

  /// mu = 0, sigma log-uniform on [0.5, 2], Lambda = Q^T D Q with a random
  /// orthogonal Q and eigenvalues log-uniform on [eig_lo, eig_hi].
  static SyntheticQuartic generate(Index dim, std::uint64_t seed, double eig_lo = 0.1,
                                   double eig_hi = 10.0);

  Index dim() const override { return mu_.size(); }
  double log_joint(const VectorXd &z) const override;
  VectorXd grad_log_joint(const VectorXd &z) const override;
  double log_joint_and_grad(const VectorXd &z, VectorXd &grad) const override;

  /// Mean-field maximizer of the ELBO. Only diag(Lambda) enters.
  GaussianVariational optimal_q() const;

  const VectorXd &mu() const { return mu_; }
  const VectorXd &sigma() const { return sigma_; }
  const MatrixXd &precision() const { return precision_; }

private:
  VectorXd mu_;
  VectorXd sigma_;
  MatrixXd precision_;
};

/// Optimal variance for one coordinate:
/// s^2 = sigma^4 / 12 (-lambda + sqrt(lambda^2 + 24 / sigma^4)), evaluated in a
/// form that does not cancel for large lambda.
double optimal_variance(double sigma, double precision_diag);

/// Mean-field ELBO of the synthetic model at mean = mu, for one coordinate,
/// up to a constant: -3/2 s^4 / sigma^4 - 1/2 s^2 lambda + 1/2 log s^2.
double synthetic_elbo_coordinate(double variance, double sigma, double precision_diag);

/**
 * Bayesian logistic regression with prior N(0, prior_variance I):
 * log p(z, x) = sum_m [x_m a_m - softplus(a_m)] - |z|^2 / (2 prior_variance),
 * a_m = theta_m^T z. The prior's normalizing constant is dropped.
 */
class LogisticRegression final : public JointModel {
public:
  LogisticRegression(MatrixXd features, VectorXd targets, double prior_variance = 100.0);

  Index dim() const override { return features_.cols(); }
  double log_joint(const VectorXd &z) const override;
  VectorXd grad_log_joint(const VectorXd &z) const override;
  double log_joint_and_grad(const VectorXd &z, VectorXd &grad) const override;

  const MatrixXd &features() const { return features_; }
  const VectorXd &targets() const { return targets_; }
  double prior_variance() const { return prior_variance_; }
  Index rows() const { return features_.rows(); }

private:
  MatrixXd features_;
  VectorXd targets_;
  double prior_variance_;
};

/// log(1 + exp(a)) without overflow.
double softplus(double a);
/// 1 / (1 + exp(-a)) without overflow.
double sigmoid(double a);

/**
 * Reads the WDBC table: per row an id, the diagnosis letter (M or B), then 30
 * numeric features. Malignant maps to 1. Each feature column is z-scored with
 * the population standard deviation and a constant-1 column is appended.
 * Throws std::runtime_error naming the line on malformed input.
 */
LogisticRegression load_wdbc(const std::filesystem::path &path,
                             double prior_variance = 100.0);

inline constexpr Index kWdbcFeatures = 30;

} // namespace svi
