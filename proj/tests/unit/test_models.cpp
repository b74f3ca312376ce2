#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>

#include "svi/models.hpp"
#include "test_support.hpp"

using namespace svi;
using svi::testing::central_difference;
using svi::testing::Gen;
using svi::testing::max_rel_error;

namespace {

const std::filesystem::path kWdbc = std::filesystem::path(SVI_DATA_DIR) / "wdbc.data";

SyntheticQuartic unit_model(Index d) {
  return SyntheticQuartic(VectorXd::Zero(d), VectorXd::Ones(d), MatrixXd::Identity(d, d));
}

std::filesystem::path write_temp(const std::string &name, const std::string &body) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << body;
  return path;
}

} // namespace

TEST_CASE("synthetic log joint and gradient examples") {
  CHECK(unit_model(1).log_joint(VectorXd::Zero(1)) == 0.0);
  CHECK(unit_model(1).log_joint(VectorXd::Ones(1)) == doctest::Approx(-1.0));
  VectorXd z(2);
  z << 1, -1;
  CHECK(unit_model(2).log_joint(z) == doctest::Approx(-2.0));

  CHECK(unit_model(3).grad_log_joint(VectorXd::Zero(3)).isZero());
  CHECK(unit_model(1).grad_log_joint(VectorXd::Ones(1))[0] == doctest::Approx(-3.0));

  VectorXd grad;
  CHECK(unit_model(2).log_joint_and_grad(z, grad) == doctest::Approx(-2.0));
  CHECK(grad[0] == doctest::Approx(-3.0));
  CHECK(grad[1] == doctest::Approx(3.0));
}

TEST_CASE("synthetic gradient matches finite differences") {
  Gen gen(101);
  const SyntheticQuartic model = SyntheticQuartic::generate(6, 9);
  for (int t = 0; t < 20; ++t) {
    const VectorXd z = gen.vector(6);
    const VectorXd fd = central_difference([&](const VectorXd &x) { return model.log_joint(x); }, z);
    CHECK(max_rel_error(model.grad_log_joint(z), fd) <= 1e-6);
    VectorXd grad;
    CHECK(model.log_joint_and_grad(z, grad) == model.log_joint(z));
    CHECK(grad == model.grad_log_joint(z));
  }
}

TEST_CASE("optimal variance") {
  CHECK(optimal_variance(1.0, 1.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(optimal_variance(1.0, 0.0) == doctest::Approx(std::sqrt(24.0) / 12.0).epsilon(1e-14));
  CHECK(optimal_variance(1.0, 1e6) * 1e6 == doctest::Approx(1.0).epsilon(1e-4));

  const auto q = unit_model(3).optimal_q();
  CHECK(q.family() == Family::MeanField);
  CHECK(q.mean().isZero());
  CHECK((q.variances().array() - 1.0 / 3.0).abs().maxCoeff() <= 1e-14);
}

TEST_CASE("optimal q is a strict local maximum") {
  Gen gen(102);
  for (int t = 0; t < 100; ++t) {
    const double sigma = gen.uniform(0.3, 3.0), lambda = gen.uniform(0.0, 20.0);
    const double log_s2 = std::log(optimal_variance(sigma, lambda));
    const double best = synthetic_elbo_coordinate(std::exp(log_s2), sigma, lambda);
    // log s moves by 1e-3, so log s^2 moves by 2e-3.
    CHECK(synthetic_elbo_coordinate(std::exp(log_s2 + 2e-3), sigma, lambda) < best);
    CHECK(synthetic_elbo_coordinate(std::exp(log_s2 - 2e-3), sigma, lambda) < best);
  }
}

TEST_CASE("generate") {
  const auto a = SyntheticQuartic::generate(8, 4);
  const auto b = SyntheticQuartic::generate(8, 4);
  CHECK(a.precision() == b.precision());
  CHECK(a.sigma() == b.sigma());
  CHECK(a.precision() != SyntheticQuartic::generate(8, 5).precision());

  CHECK((a.precision() - a.precision().transpose()).cwiseAbs().maxCoeff() <= 1e-12);
  const VectorXd eig = Eigen::SelfAdjointEigenSolver<MatrixXd>(a.precision()).eigenvalues();
  CHECK(eig.minCoeff() >= 0.1 - 1e-9);
  CHECK(eig.maxCoeff() <= 10.0 + 1e-9);
  CHECK(a.sigma().minCoeff() >= 0.5);
  CHECK(a.sigma().maxCoeff() <= 2.0);
  CHECK(a.mu().isZero());

  CHECK(SyntheticQuartic::generate(1, 3, 1.0, 1.0).precision()(0, 0) == 1.0);
  CHECK_THROWS_AS(SyntheticQuartic::generate(0, 1), std::invalid_argument);
  CHECK_THROWS_AS(SyntheticQuartic::generate(3, 1, 2.0, 1.0), std::invalid_argument);
}

TEST_CASE("synthetic model validation") {
  MatrixXd asym = MatrixXd::Identity(2, 2);
  asym(0, 1) = 0.5;
  CHECK_THROWS_AS(SyntheticQuartic(VectorXd::Zero(2), VectorXd::Ones(2), asym),
                  std::invalid_argument);
  CHECK_THROWS_AS(SyntheticQuartic(VectorXd::Zero(2), VectorXd::Zero(2), MatrixXd::Identity(2, 2)),
                  std::invalid_argument);
}

TEST_CASE("softplus and sigmoid") {
  CHECK(softplus(0.0) == doctest::Approx(std::log(2.0)));
  CHECK(softplus(800.0) == 800.0);
  CHECK(softplus(-800.0) == 0.0);
  CHECK(sigmoid(0.0) == 0.5);
  CHECK(sigmoid(-800.0) == 0.0);
  CHECK(sigmoid(800.0) == 1.0);
}

TEST_CASE("logistic examples") {
  const LogisticRegression single(MatrixXd::Ones(1, 1), VectorXd::Ones(1));
  CHECK(single.log_joint(VectorXd::Zero(1)) == doctest::Approx(-0.6931472).epsilon(1e-7));
  CHECK(single.grad_log_joint(VectorXd::Zero(1))[0] == doctest::Approx(0.5));

  // a = 50 with x = 1: 50 - softplus(50) = -log1p(e^-50), prior -2500/200.
  const double extreme = single.log_joint(VectorXd::Constant(1, 50.0)) + 2500.0 / 200.0;
  CHECK(std::isfinite(extreme));
  CHECK(extreme == doctest::Approx(-1.9287498479639178e-22).epsilon(1e-6));
  CHECK(std::isfinite(single.log_joint(VectorXd::Constant(1, -1e4))));
}

TEST_CASE("logistic gradient matches finite differences") {
  Gen gen(103);
  const LogisticRegression model(gen.matrix(40, 5), (gen.vector(40).array() > 0).cast<double>(), 10.0);
  for (int t = 0; t < 20; ++t) {
    const VectorXd z = gen.vector(5);
    const VectorXd fd = central_difference([&](const VectorXd &x) { return model.log_joint(x); }, z);
    CHECK(max_rel_error(model.grad_log_joint(z), fd) <= 1e-6);
  }
}

TEST_CASE("logistic log joint is concave") {
  Gen gen(104);
  const LogisticRegression model(gen.matrix(30, 4), (gen.vector(30).array() > 0).cast<double>());
  for (int t = 0; t < 50; ++t) {
    const VectorXd a = gen.vector(4, 3.0), b = gen.vector(4, 3.0);
    CHECK(model.log_joint(0.5 * (a + b)) >= 0.5 * (model.log_joint(a) + model.log_joint(b)));
  }
}

TEST_CASE("WDBC") {
  const LogisticRegression model = load_wdbc(kWdbc);
  REQUIRE(model.rows() == 569);
  REQUIRE(model.dim() == kWdbcFeatures + 1);
  CHECK(model.targets().sum() == 212.0);
  CHECK(((model.targets().array() == 0) || (model.targets().array() == 1)).all());
  CHECK(model.prior_variance() == 100.0);

  const MatrixXd &x = model.features();
  for (Index j = 0; j < kWdbcFeatures; ++j) {
    const double mean = x.col(j).mean();
    const double sd = std::sqrt((x.col(j).array() - mean).square().mean());
    CHECK(std::abs(mean) <= 1e-10);
    CHECK(std::abs(sd - 1.0) <= 1e-10);
  }
  CHECK((x.col(kWdbcFeatures).array() == 1.0).all());

  CHECK(model.log_joint(VectorXd::Zero(31)) == doctest::Approx(-569.0 * std::log(2.0)));
  const VectorXd expected = x.transpose() * (model.targets().array() - 0.5).matrix();
  CHECK((model.grad_log_joint(VectorXd::Zero(31)) - expected).norm() <= 1e-10);

  Gen gen(105);
  for (int t = 0; t < 10; ++t) {
    const VectorXd z = gen.vector(31, 0.3);
    const VectorXd fd = central_difference([&](const VectorXd &v) { return model.log_joint(v); }, z);
    CHECK(max_rel_error(model.grad_log_joint(z), fd) <= 1e-6);
  }

  CHECK(load_wdbc(kWdbc).features() == x);
}

TEST_CASE("WDBC errors name the line") {
  std::string row = "1,M";
  for (int i = 0; i < 30; ++i) row += "," + std::to_string(i + 1);
  std::string other = "2,B";
  for (int i = 0; i < 30; ++i) other += "," + std::to_string(2 * i + 3);

  auto message = [](const std::filesystem::path &p) {
    try {
      load_wdbc(p);
    } catch (const std::runtime_error &e) {
      return std::string(e.what());
    }
    return std::string();
  };

  const auto short_row = write_temp("svi_wdbc_short.data", row + "\n" + other.substr(0, other.rfind(',')) + "\n");
  CHECK(message(short_row).find("line 2") != std::string::npos);

  std::string bad_label = row + "\n" + other;
  bad_label[row.size() + 3] = 'X';
  const auto label = write_temp("svi_wdbc_label.data", bad_label + "\n");
  CHECK(message(label).find("line 2") != std::string::npos);

  const auto number = write_temp("svi_wdbc_number.data", row + "\n" + other + "\n3,B,abc" + other.substr(other.find(',', 4)) + "\n");
  CHECK(message(number).find("line 3") != std::string::npos);

  CHECK_THROWS_AS(load_wdbc("/nonexistent/wdbc.data"), std::runtime_error);
}
