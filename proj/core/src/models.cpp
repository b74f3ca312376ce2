#include "svi/models.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "svi/rng.hpp"

namespace svi {

SyntheticQuartic::SyntheticQuartic(VectorXd mu, VectorXd sigma, MatrixXd precision)
    : mu_(std::move(mu)), sigma_(std::move(sigma)), precision_(std::move(precision)) {
  const Index d = mu_.size();
  if (d < 1 || sigma_.size() != d || precision_.rows() != d || precision_.cols() != d) {
    throw std::invalid_argument("SyntheticQuartic: inconsistent dimensions");
  }
  if ((sigma_.array() <= 0.0).any()) {
    throw std::invalid_argument("SyntheticQuartic: sigma must be positive");
  }
  const double scale = std::max(1.0, precision_.cwiseAbs().maxCoeff());
  if ((precision_ - precision_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw std::invalid_argument("SyntheticQuartic: precision must be symmetric");
  }
  if ((precision_.diagonal().array() < 0.0).any()) {
    throw std::invalid_argument("SyntheticQuartic: precision diagonal must be >= 0");
  }
}

SyntheticQuartic SyntheticQuartic::generate(Index dim, std::uint64_t seed, double eig_lo,
                                            double eig_hi) {
  if (dim < 1) {
    throw std::invalid_argument("SyntheticQuartic::generate: dim must be positive");
  }
  if (!(eig_lo > 0.0) || !(eig_hi >= eig_lo)) {
    throw std::invalid_argument("SyntheticQuartic::generate: need 0 < eig_lo <= eig_hi");
  }
  Rng root(seed);
  Rng sigma_rng = root.split(0);
  Rng rotation_rng = root.split(1);
  Rng spectrum_rng = root.split(2);

  const auto log_uniform = [](Rng &rng, double lo, double hi) {
    const double log_lo = std::log(lo);
    return std::exp(log_lo + rng.uniform() * (std::log(hi) - log_lo));
  };

  VectorXd sigma(dim);
  for (Index i = 0; i < dim; ++i) {
    sigma[i] = log_uniform(sigma_rng, 0.5, 2.0);
  }

  MatrixXd gaussian(dim, dim);
  for (Index r = 0; r < dim; ++r) {
    for (Index c = 0; c < dim; ++c) {
      gaussian(r, c) = rotation_rng.normal();
    }
  }
  // Haar-distributed rotation: QR of a Gaussian matrix, signs fixed by diag(R).
  Eigen::HouseholderQR<MatrixXd> qr(gaussian);
  MatrixXd rotation = qr.householderQ();
  const MatrixXd r_factor = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index c = 0; c < dim; ++c) {
    if (r_factor(c, c) < 0.0) {
      rotation.col(c) *= -1.0;
    }
  }

  VectorXd eigenvalues(dim);
  for (Index i = 0; i < dim; ++i) {
    eigenvalues[i] = eig_lo == eig_hi ? eig_lo : log_uniform(spectrum_rng, eig_lo, eig_hi);
  }
  MatrixXd precision = rotation.transpose() * eigenvalues.asDiagonal() * rotation;
  precision = 0.5 * (precision + precision.transpose()).eval();
  return SyntheticQuartic(VectorXd::Zero(dim), std::move(sigma), std::move(precision));
}

double SyntheticQuartic::log_joint(const VectorXd &z) const {
  const VectorXd r = z - mu_;
  const double quartic = r.cwiseQuotient(sigma_).array().pow(4).sum();
  return -0.5 * quartic - 0.5 * r.dot(precision_ * r);
}

VectorXd SyntheticQuartic::grad_log_joint(const VectorXd &z) const {
  const VectorXd r = z - mu_;
  return (-2.0 * r.array().cube() / sigma_.array().pow(4)).matrix() - precision_ * r;
}

double SyntheticQuartic::log_joint_and_grad(const VectorXd &z, VectorXd &grad) const {
  const VectorXd r = z - mu_;
  const VectorXd scaled = r.cwiseQuotient(sigma_);
  const VectorXd lr = precision_ * r;
  grad = (-2.0 * r.array().cube() / sigma_.array().pow(4)).matrix() - lr;
  return -0.5 * scaled.array().pow(4).sum() - 0.5 * r.dot(lr);
}

double optimal_variance(double sigma, double precision_diag) {
  // sigma^4/12 (-l + sqrt(l^2 + 24/sigma^4)) == 2 / (l + sqrt(l^2 + 24/sigma^4))
  const double inv_sigma4 = 1.0 / std::pow(sigma, 4);
  return 2.0 / (precision_diag +
                std::sqrt(precision_diag * precision_diag + 24.0 * inv_sigma4));
}

double synthetic_elbo_coordinate(double variance, double sigma, double precision_diag) {
  return -1.5 * variance * variance / std::pow(sigma, 4) -
         0.5 * variance * precision_diag + 0.5 * std::log(variance);
}

GaussianVariational SyntheticQuartic::optimal_q() const {
  VectorXd log_std(dim());
  for (Index i = 0; i < dim(); ++i) {
    log_std[i] = 0.5 * std::log(optimal_variance(sigma_[i], precision_(i, i)));
  }
  return GaussianVariational::mean_field(mu_, std::move(log_std));
}

double softplus(double a) {
  return a > 0.0 ? a + std::log1p(std::exp(-a)) : std::log1p(std::exp(a));
}

double sigmoid(double a) {
  if (a >= 0.0) {
    return 1.0 / (1.0 + std::exp(-a));
  }
  const double e = std::exp(a);
  return e / (1.0 + e);
}

LogisticRegression::LogisticRegression(MatrixXd features, VectorXd targets,
                                       double prior_variance)
    : features_(std::move(features)), targets_(std::move(targets)),
      prior_variance_(prior_variance) {
  if (features_.rows() < 1 || features_.cols() < 1 || targets_.size() != features_.rows()) {
    throw std::invalid_argument("LogisticRegression: inconsistent dimensions");
  }
  if (((targets_.array() != 0.0) && (targets_.array() != 1.0)).any()) {
    throw std::invalid_argument("LogisticRegression: targets must be 0 or 1");
  }
  if (!(prior_variance_ > 0.0)) {
    throw std::invalid_argument("LogisticRegression: prior variance must be positive");
  }
}

double LogisticRegression::log_joint(const VectorXd &z) const {
  const VectorXd logits = features_ * z;
  double sum = 0.0;
  for (Index m = 0; m < logits.size(); ++m) {
    sum += targets_[m] * logits[m] - softplus(logits[m]);
  }
  return sum - 0.5 * z.squaredNorm() / prior_variance_;
}

VectorXd LogisticRegression::grad_log_joint(const VectorXd &z) const {
  VectorXd grad;
  log_joint_and_grad(z, grad);
  return grad;
}

double LogisticRegression::log_joint_and_grad(const VectorXd &z, VectorXd &grad) const {
  const VectorXd logits = features_ * z;
  VectorXd residual(logits.size());
  double sum = 0.0;
  for (Index m = 0; m < logits.size(); ++m) {
    sum += targets_[m] * logits[m] - softplus(logits[m]);
    residual[m] = targets_[m] - sigmoid(logits[m]);
  }
  grad = features_.transpose() * residual - z / prior_variance_;
  return sum - 0.5 * z.squaredNorm() / prior_variance_;
}

namespace {

std::vector<std::string> split_fields(const std::string &line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) {
    fields.push_back(field);
  }
  if (!line.empty() && line.back() == ',') {
    fields.emplace_back();
  }
  return fields;
}

std::string trim(const std::string &s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_number(const std::string &text, std::size_t line_no, std::size_t column) {
  const std::string t = trim(text);
  double value = 0.0;
  const auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (t.empty() || ec != std::errc() || end != t.data() + t.size() || !std::isfinite(value)) {
    throw std::runtime_error("wdbc line " + std::to_string(line_no) + ": column " +
                             std::to_string(column + 1) + " is not a number: '" + t + "'");
  }
  return value;
}

} // namespace

LogisticRegression load_wdbc(const std::filesystem::path &path, double prior_variance) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open wdbc file '" + path.string() + "'");
  }
  constexpr std::size_t kColumns = 2 + kWdbcFeatures;
  std::vector<double> values;
  std::vector<double> targets;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) {
      continue;
    }
    const auto fields = split_fields(line);
    if (fields.size() != kColumns) {
      throw std::runtime_error("wdbc line " + std::to_string(line_no) + ": expected " +
                               std::to_string(kColumns) + " columns, got " +
                               std::to_string(fields.size()));
    }
    const std::string diagnosis = trim(fields[1]);
    if (diagnosis == "M") {
      targets.push_back(1.0);
    } else if (diagnosis == "B") {
      targets.push_back(0.0);
    } else {
      throw std::runtime_error("wdbc line " + std::to_string(line_no) +
                               ": diagnosis must be M or B, got '" + diagnosis + "'");
    }
    for (std::size_t c = 2; c < kColumns; ++c) {
      values.push_back(parse_number(fields[c], line_no, c));
    }
  }
  const Index rows = static_cast<Index>(targets.size());
  if (rows < 2) {
    throw std::runtime_error("wdbc file '" + path.string() + "' has fewer than two rows");
  }

  MatrixXd features(rows, kWdbcFeatures + 1);
  for (Index r = 0; r < rows; ++r) {
    for (Index c = 0; c < kWdbcFeatures; ++c) {
      features(r, c) = values[static_cast<std::size_t>(r * kWdbcFeatures + c)];
    }
  }
  for (Index c = 0; c < kWdbcFeatures; ++c) {
    auto column = features.col(c);
    const double mean = column.mean();
    column.array() -= mean;
    const double sd = std::sqrt(column.squaredNorm() / static_cast<double>(rows));
    if (!(sd > 0.0)) {
      throw std::runtime_error("wdbc feature " + std::to_string(c + 1) + " is constant");
    }
    column /= sd;
  }
  features.col(kWdbcFeatures).setOnes();
  return LogisticRegression(std::move(features),
                            Eigen::Map<const VectorXd>(targets.data(), rows), prior_variance);
}

} // namespace svi
