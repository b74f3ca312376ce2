#include "svi/estimators.hpp"

#include <cmath>

namespace svi {

namespace {

void check_value(double value, const char *what, Index sample) {
  if (!std::isfinite(value)) {
    throw NonFiniteError(std::string(what) + " is not finite", sample);
  }
}

void check_vector(const VectorXd &v, const char *what, Index sample) {
  if (!v.allFinite()) {
    throw NonFiniteError(std::string(what) + " is not finite", sample);
  }
}

void check_batch(const GaussianVariational &q, const MatrixXd &batch, const char *what) {
  if (batch.rows() < 1) {
    throw std::invalid_argument(std::string(what) + ": empty batch");
  }
  if (batch.cols() != q.dim()) {
    throw std::invalid_argument(std::string(what) + ": batch has " +
                                std::to_string(batch.cols()) + " columns, expected " +
                                std::to_string(q.dim()));
  }
}

// Shared pathwise loop. With `total`, the direct parameter term is removed.
GradEstimate pathwise(const JointModel &model, const GaussianVariational &q,
                      const MatrixXd &eps_batch, bool total) {
  check_batch(q, eps_batch, total ? "grad_pathwise_total" : "grad_pathwise_stl");
  const Index batch = eps_batch.rows();
  GradEstimate out;
  out.batch = batch;
  out.grad = FlatParams::Zero(flat_size(q.family(), q.dim()));
  VectorXd grad_joint(q.dim());
  double elbo = 0.0;
  for (Index s = 0; s < batch; ++s) {
    const VectorXd eps = eps_batch.row(s).transpose();
    const VectorXd z = reparameterize(q, eps);
    const double log_p = model.log_joint_and_grad(z, grad_joint);
    check_value(log_p, "log_joint", s);
    check_vector(grad_joint, "grad_log_joint", s);
    elbo += log_p - log_density(q, z);
    const VectorXd bracket = grad_joint - grad_logq_z(q, z);
    add_path_gradient(q, bracket, eps, out.grad);
    if (total) {
      out.grad -= grad_logq_params(q, z);
    }
  }
  const double inv = 1.0 / static_cast<double>(batch);
  out.grad *= inv;
  out.elbo_estimate = elbo * inv;
  check_vector(out.grad, "gradient estimate", batch - 1);
  return out;
}

} // namespace

void add_path_gradient(const GaussianVariational &q, const VectorXd &grad_z,
                       const VectorXd &eps, FlatParams &out) {
  const Index d = q.dim();
  out.head(d) += grad_z;
  if (q.family() == Family::MeanField) {
    out.tail(d) += grad_z.cwiseProduct(eps).cwiseProduct(q.std_dev());
    return;
  }
  const MatrixXd chol = q.cholesky();
  for (Index r = 0; r < d; ++r) {
    for (Index c = 0; c < r; ++c) {
      out[flat_chol_index(d, r, c)] += grad_z[r] * eps[c];
    }
    // d z_r / d log L_rr = L_rr eps_r
    out[flat_chol_index(d, r, r)] += grad_z[r] * eps[r] * chol(r, r);
  }
}

double elbo_estimate(const JointModel &model, const GaussianVariational &q,
                     const MatrixXd &eps_batch) {
  check_batch(q, eps_batch, "elbo_estimate");
  double sum = 0.0;
  for (Index s = 0; s < eps_batch.rows(); ++s) {
    const VectorXd z = reparameterize(q, eps_batch.row(s).transpose());
    const double log_p = model.log_joint(z);
    check_value(log_p, "log_joint", s);
    sum += log_p - log_density(q, z);
  }
  return sum / static_cast<double>(eps_batch.rows());
}

GradEstimate grad_score_function(const JointModel &model, const GaussianVariational &q,
                                 const MatrixXd &z_batch) {
  check_batch(q, z_batch, "grad_score_function");
  const Index batch = z_batch.rows();
  GradEstimate out;
  out.batch = batch;
  out.grad = FlatParams::Zero(flat_size(q.family(), q.dim()));
  double elbo = 0.0;
  for (Index s = 0; s < batch; ++s) {
    const VectorXd z = z_batch.row(s).transpose();
    const double log_p = model.log_joint(z);
    check_value(log_p, "log_joint", s);
    const double weight = log_p - log_density(q, z);
    elbo += weight;
    out.grad += weight * grad_logq_params(q, z);
  }
  const double inv = 1.0 / static_cast<double>(batch);
  out.grad *= inv;
  out.elbo_estimate = elbo * inv;
  check_vector(out.grad, "gradient estimate", batch - 1);
  return out;
}

GradEstimate grad_pathwise_total(const JointModel &model, const GaussianVariational &q,
                                 const MatrixXd &eps_batch) {
  return pathwise(model, q, eps_batch, true);
}

GradEstimate grad_pathwise_stl(const JointModel &model, const GaussianVariational &q,
                               const MatrixXd &eps_batch) {
  return pathwise(model, q, eps_batch, false);
}

GradEstimate estimate_gradient(Estimator kind, const JointModel &model,
                               const GaussianVariational &q, const MatrixXd &eps_batch) {
  switch (kind) {
  case Estimator::Stl:
    return grad_pathwise_stl(model, q, eps_batch);
  case Estimator::PathwiseTotal:
    return grad_pathwise_total(model, q, eps_batch);
  case Estimator::ScoreFunction: {
    check_batch(q, eps_batch, "grad_score_function");
    MatrixXd z_batch(eps_batch.rows(), eps_batch.cols());
    for (Index s = 0; s < eps_batch.rows(); ++s) {
      z_batch.row(s) = reparameterize(q, eps_batch.row(s).transpose()).transpose();
    }
    return grad_score_function(model, q, z_batch);
  }
  }
  throw std::invalid_argument("estimate_gradient: unknown estimator");
}

} // namespace svi
