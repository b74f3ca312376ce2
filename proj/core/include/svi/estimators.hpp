#pragma once

#include <stdexcept>
#include <string>

#include "svi/gaussian.hpp"

namespace svi {

/// Unnormalized log p(z, x) with its gradient in z. Additive constants are
/// irrelevant to everything that consumes this interface.
class JointModel {
public:
  virtual ~JointModel() = default;

  virtual Index dim() const = 0;
  virtual double log_joint(const VectorXd &z) const = 0;
  virtual VectorXd grad_log_joint(const VectorXd &z) const = 0;

  /// Value and gradient together; models override when they share work.
  virtual double log_joint_and_grad(const VectorXd &z, VectorXd &grad) const {
    grad = grad_log_joint(z);
    return log_joint(z);
  }
};

/// Raised when a model or estimator produces NaN or infinity.
class NonFiniteError : public std::runtime_error {
public:
  NonFiniteError(const std::string &what, Index sample)
      : std::runtime_error(what + " (sample " + std::to_string(sample) + ")"),
        sample_(sample) {}

  Index sample() const { return sample_; }

private:
  Index sample_;
};

struct GradEstimate {
  FlatParams grad;
  /// Batch ELBO estimate from the same draws.
  double elbo_estimate = 0.0;
  Index batch = 0;
};

enum class Estimator { Stl, PathwiseTotal, ScoreFunction };

// All estimators take one draw per row and reduce in row order, so results
// are bit-reproducible for a given batch.

/// (1/S) sum_s [log p(z_s) - log q(z_s)], z_s = mean + L eps_s.
double elbo_estimate(const JointModel &model, const GaussianVariational &q,
                     const MatrixXd &eps_batch);

/// Score-function (REINFORCE) estimator over draws z_s ~ q supplied by the
/// caller.
GradEstimate grad_score_function(const JointModel &model, const GaussianVariational &q,
                                 const MatrixXd &z_batch);

/// Exact gradient of elbo_estimate at fixed eps: pathwise term minus the
/// direct dependence of log q on the parameters.
GradEstimate grad_pathwise_total(const JointModel &model, const GaussianVariational &q,
                                 const MatrixXd &eps_batch);

/// Sticking-the-landing estimator: pathwise term only.
GradEstimate grad_pathwise_stl(const JointModel &model, const GaussianVariational &q,
                               const MatrixXd &eps_batch);

/// Dispatch on the estimator kind. ScoreFunction reparameterizes eps first.
GradEstimate estimate_gradient(Estimator kind, const JointModel &model,
                               const GaussianVariational &q, const MatrixXd &eps_batch);

/// Adds g^T dz/dlambda for z = mean + L eps to a flat gradient.
void add_path_gradient(const GaussianVariational &q, const VectorXd &grad_z,
                       const VectorXd &eps, FlatParams &out);

} // namespace svi
