#pragma once

#include <Eigen/Core>

namespace svi {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

enum class Family { MeanField, FullRank };

/// Flat view of the variational parameters, as seen by optimizers and the
/// SNR window. Layout: the d mean entries, then the scale block.
///   MeanField: d log standard deviations.
///   FullRank:  lower triangle of L row by row; row r holds its r strict
///              entries raw followed by log L(r, r).
using FlatParams = VectorXd;

/// Length of the flat vector for a family of dimension d.
Index flat_size(Family family, Index dim);

/// Position of L(row, col), col <= row, inside the FullRank flat vector.
inline Index flat_chol_index(Index dim, Index row, Index col) {
  return dim + row * (row + 1) / 2 + col;
}

/**
 * Gaussian variational distribution N(mean, L L^T).
 *
 * The diagonal of L is stored in log domain, so every real flat vector maps
 * to a valid distribution and the realized L always has a positive diagonal.
 */
class GaussianVariational {
public:
  static GaussianVariational mean_field(VectorXd mean, VectorXd log_std);
  /// Only the lower triangle of chol_raw is read; its diagonal is log L(i, i).
  static GaussianVariational full_rank(VectorXd mean, const MatrixXd &chol_raw);
  /// Builds from a realized lower-triangular factor with positive diagonal.
  static GaussianVariational from_cholesky(VectorXd mean, const MatrixXd &chol);
  static GaussianVariational from_flat(Family family, Index dim,
                                       const FlatParams &flat);

  FlatParams to_flat() const;

  Index dim() const { return mean_.size(); }
  Family family() const { return family_; }
  const VectorXd &mean() const { return mean_; }

  /// MeanField only: log standard deviations.
  const VectorXd &log_std() const { return log_std_; }
  /// MeanField only: standard deviations.
  const VectorXd &std_dev() const { return std_; }

  /// Realized Cholesky factor L (dense, lower triangular).
  MatrixXd cholesky() const;
  MatrixXd covariance() const;
  /// Diagonal of the covariance.
  VectorXd variances() const;

  /// Sum of log L(i, i).
  double log_det_chol() const;
  double entropy() const;

  /// The mean-field distribution with the same mean and marginal variances.
  GaussianVariational marginals() const;

  /// L x.
  VectorXd scale(const VectorXd &x) const;
  /// L^{-1} x by forward substitution.
  VectorXd solve_lower(const VectorXd &x) const;
  /// L^{-T} x by back substitution.
  VectorXd solve_upper(const VectorXd &x) const;

  bool operator==(const GaussianVariational &other) const;

private:
  GaussianVariational() = default;

  Family family_ = Family::MeanField;
  VectorXd mean_;
  VectorXd log_std_; // MeanField
  VectorXd std_;     // MeanField, exp(log_std_)
  MatrixXd chol_;    // FullRank, realized L
  VectorXd log_diag_; // FullRank, stored log L(i, i)
};

/// z = mean + L eps.
VectorXd reparameterize(const GaussianVariational &q, const VectorXd &eps);

/// log q(z), via a triangular solve.
double log_density(const GaussianVariational &q, const VectorXd &z);

/// Gradient of log q(z) in z: -Sigma^{-1} (z - mean).
VectorXd grad_logq_z(const GaussianVariational &q, const VectorXd &z);

/// Gradient of log q(z) in the flat parameters, z held fixed.
FlatParams grad_logq_params(const GaussianVariational &q, const VectorXd &z);

/// Closed-form KL(q0 || q1).
double kl_gaussian(const GaussianVariational &q0, const GaussianVariational &q1);

/// KL(q0 || q1) + KL(q1 || q0).
double jeffreys(const GaussianVariational &q0, const GaussianVariational &q1);

} // namespace svi
