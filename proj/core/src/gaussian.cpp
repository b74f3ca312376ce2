#include "svi/gaussian.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace svi {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;

void require_dim(Index expected, Index got, const char *what) {
  if (expected != got) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch (expected " +
                                std::to_string(expected) + ", got " +
                                std::to_string(got) + ")");
  }
}

} // namespace

Index flat_size(Family family, Index dim) {
  return family == Family::MeanField ? 2 * dim : dim + dim * (dim + 1) / 2;
}

GaussianVariational GaussianVariational::mean_field(VectorXd mean, VectorXd log_std) {
  require_dim(mean.size(), log_std.size(), "mean_field");
  if (mean.size() < 1) {
    throw std::invalid_argument("mean_field: dimension must be positive");
  }
  GaussianVariational q;
  q.family_ = Family::MeanField;
  q.mean_ = std::move(mean);
  q.log_std_ = std::move(log_std);
  q.std_ = q.log_std_.array().exp().matrix();
  return q;
}

GaussianVariational GaussianVariational::full_rank(VectorXd mean, const MatrixXd &chol_raw) {
  const Index d = mean.size();
  if (d < 1) {
    throw std::invalid_argument("full_rank: dimension must be positive");
  }
  require_dim(d, chol_raw.rows(), "full_rank");
  require_dim(d, chol_raw.cols(), "full_rank");
  GaussianVariational q;
  q.family_ = Family::FullRank;
  q.mean_ = std::move(mean);
  q.chol_ = chol_raw.triangularView<Eigen::StrictlyLower>();
  q.log_diag_ = chol_raw.diagonal();
  q.chol_.diagonal() = q.log_diag_.array().exp().matrix();
  return q;
}

GaussianVariational GaussianVariational::from_cholesky(VectorXd mean, const MatrixXd &chol) {
  if ((chol.diagonal().array() <= 0.0).any()) {
    throw std::invalid_argument("from_cholesky: diagonal must be positive");
  }
  MatrixXd raw = chol;
  raw.diagonal() = chol.diagonal().array().log().matrix();
  return full_rank(std::move(mean), raw);
}

GaussianVariational GaussianVariational::from_flat(Family family, Index dim,
                                                   const FlatParams &flat) {
  require_dim(flat_size(family, dim), flat.size(), "from_flat");
  VectorXd mean = flat.head(dim);
  if (family == Family::MeanField) {
    return mean_field(std::move(mean), flat.tail(dim));
  }
  MatrixXd raw = MatrixXd::Zero(dim, dim);
  Index pos = dim;
  for (Index r = 0; r < dim; ++r) {
    for (Index c = 0; c <= r; ++c) {
      raw(r, c) = flat[pos++];
    }
  }
  return full_rank(std::move(mean), raw);
}

FlatParams GaussianVariational::to_flat() const {
  const Index d = dim();
  FlatParams flat(flat_size(family_, d));
  flat.head(d) = mean_;
  if (family_ == Family::MeanField) {
    flat.tail(d) = log_std_;
    return flat;
  }
  Index pos = d;
  for (Index r = 0; r < d; ++r) {
    for (Index c = 0; c < r; ++c) {
      flat[pos++] = chol_(r, c);
    }
    flat[pos++] = log_diag_[r];
  }
  return flat;
}

MatrixXd GaussianVariational::cholesky() const {
  if (family_ == Family::MeanField) {
    return std_.asDiagonal();
  }
  return chol_;
}

MatrixXd GaussianVariational::covariance() const {
  if (family_ == Family::MeanField) {
    return std_.array().square().matrix().asDiagonal();
  }
  return chol_ * chol_.transpose();
}

VectorXd GaussianVariational::variances() const {
  if (family_ == Family::MeanField) {
    return std_.array().square().matrix();
  }
  return chol_.rowwise().squaredNorm();
}

double GaussianVariational::log_det_chol() const {
  return family_ == Family::MeanField ? log_std_.sum() : log_diag_.sum();
}

double GaussianVariational::entropy() const {
  return 0.5 * static_cast<double>(dim()) * (1.0 + kLog2Pi) + log_det_chol();
}

GaussianVariational GaussianVariational::marginals() const {
  if (family_ == Family::MeanField) {
    return *this;
  }
  return mean_field(mean_, (0.5 * variances().array().log()).matrix());
}

VectorXd GaussianVariational::scale(const VectorXd &x) const {
  require_dim(dim(), x.size(), "scale");
  if (family_ == Family::MeanField) {
    return std_.cwiseProduct(x);
  }
  return chol_.triangularView<Eigen::Lower>() * x;
}

VectorXd GaussianVariational::solve_lower(const VectorXd &x) const {
  require_dim(dim(), x.size(), "solve_lower");
  if (family_ == Family::MeanField) {
    return x.cwiseQuotient(std_);
  }
  return chol_.triangularView<Eigen::Lower>().solve(x);
}

VectorXd GaussianVariational::solve_upper(const VectorXd &x) const {
  require_dim(dim(), x.size(), "solve_upper");
  if (family_ == Family::MeanField) {
    return x.cwiseQuotient(std_);
  }
  return chol_.transpose().triangularView<Eigen::Upper>().solve(x);
}

bool GaussianVariational::operator==(const GaussianVariational &other) const {
  if (family_ != other.family_ || dim() != other.dim()) {
    return false;
  }
  return to_flat() == other.to_flat();
}

VectorXd reparameterize(const GaussianVariational &q, const VectorXd &eps) {
  require_dim(q.dim(), eps.size(), "reparameterize");
  return q.mean() + q.scale(eps);
}

double log_density(const GaussianVariational &q, const VectorXd &z) {
  require_dim(q.dim(), z.size(), "log_density");
  const VectorXd w = q.solve_lower(z - q.mean());
  return -0.5 * w.squaredNorm() - q.log_det_chol() -
         0.5 * static_cast<double>(q.dim()) * kLog2Pi;
}

VectorXd grad_logq_z(const GaussianVariational &q, const VectorXd &z) {
  require_dim(q.dim(), z.size(), "grad_logq_z");
  return -q.solve_upper(q.solve_lower(z - q.mean()));
}

FlatParams grad_logq_params(const GaussianVariational &q, const VectorXd &z) {
  require_dim(q.dim(), z.size(), "grad_logq_params");
  const Index d = q.dim();
  const VectorXd w = q.solve_lower(z - q.mean());
  // v = Sigma^{-1} (z - mean); d log q / dL = v w^T on the lower triangle,
  // minus diag(1 / L_ii).
  const VectorXd v = q.solve_upper(w);
  FlatParams grad(flat_size(q.family(), d));
  grad.head(d) = v;
  if (q.family() == Family::MeanField) {
    grad.tail(d) = (w.array().square() - 1.0).matrix();
    return grad;
  }
  const MatrixXd chol = q.cholesky();
  for (Index r = 0; r < d; ++r) {
    for (Index c = 0; c < r; ++c) {
      grad[flat_chol_index(d, r, c)] = v[r] * w[c];
    }
    grad[flat_chol_index(d, r, r)] = chol(r, r) * v[r] * w[r] - 1.0;
  }
  return grad;
}

double kl_gaussian(const GaussianVariational &q0, const GaussianVariational &q1) {
  require_dim(q0.dim(), q1.dim(), "kl_gaussian");
  const double d = static_cast<double>(q0.dim());
  const VectorXd diff = q1.mean() - q0.mean();
  double trace = 0.0;
  if (q0.family() == Family::MeanField && q1.family() == Family::MeanField) {
    trace = q0.std_dev().cwiseQuotient(q1.std_dev()).squaredNorm();
  } else {
    const MatrixXd l0 = q0.cholesky();
    const MatrixXd l1 = q1.cholesky();
    trace = l1.triangularView<Eigen::Lower>().solve(l0).squaredNorm();
  }
  const double mahalanobis = q1.solve_lower(diff).squaredNorm();
  const double log_det_ratio = 2.0 * (q1.log_det_chol() - q0.log_det_chol());
  const double kl = 0.5 * (trace + mahalanobis - d + log_det_ratio);
  return kl > 0.0 ? kl : 0.0;
}

double jeffreys(const GaussianVariational &q0, const GaussianVariational &q1) {
  return kl_gaussian(q0, q1) + kl_gaussian(q1, q0);
}

} // namespace svi
