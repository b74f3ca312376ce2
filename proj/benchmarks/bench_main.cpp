#include <benchmark/benchmark.h>

#include <filesystem>

#include "svi/estimators.hpp"
#include "svi/lr_control.hpp"
#include "svi/models.hpp"
#include "svi/optimizers.hpp"
#include "svi/rng.hpp"

using namespace svi;

namespace {

void BM_SnrAccumulate(benchmark::State &state) {
  const auto size = static_cast<Index>(state.range(0));
  SnrWindow window(size);
  Rng rng(1);
  const VectorXd lambda = sample_eps(size, 1, rng).row(0).transpose();
  for (auto _ : state) {
    window.accumulate(lambda);
    benchmark::DoNotOptimize(window.a().data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SnrAccumulate)->Arg(20)->Arg(527)->Arg(5000);

void BM_SnrRho(benchmark::State &state) {
  const auto size = static_cast<Index>(state.range(0));
  SnrWindow window(size);
  Rng rng(2);
  for (int i = 0; i < 100; ++i) window.accumulate(sample_eps(size, 1, rng).row(0).transpose());
  for (auto _ : state) benchmark::DoNotOptimize(mean_snr(window.rho()));
}
BENCHMARK(BM_SnrRho)->Arg(20)->Arg(527);

void BM_OptimizerStep(benchmark::State &state) {
  const auto kind = static_cast<OptimizerKind>(state.range(0));
  Optimizer opt(kind, 527);
  Rng rng(3);
  VectorXd lambda = VectorXd::Zero(527);
  const VectorXd grad = sample_eps(527, 1, rng).row(0).transpose();
  for (auto _ : state) {
    lambda = opt.step(1e-6, lambda, grad);
    benchmark::DoNotOptimize(lambda.data());
  }
  state.SetLabel(std::string(to_string(kind)));
}
BENCHMARK(BM_OptimizerStep)->DenseRange(0, 4);

void BM_StlSynthetic(benchmark::State &state) {
  const auto model = SyntheticQuartic::generate(10, 1);
  const auto q = GaussianVariational::mean_field(VectorXd::Zero(10), VectorXd::Zero(10));
  Rng rng(4);
  const MatrixXd eps = sample_eps(10, state.range(0), rng);
  for (auto _ : state) benchmark::DoNotOptimize(grad_pathwise_stl(model, q, eps));
}
BENCHMARK(BM_StlSynthetic)->Arg(2)->Arg(32);

void BM_StlLogisticFullRank(benchmark::State &state) {
  const auto model = load_wdbc(std::filesystem::path(SVI_DATA_DIR) / "wdbc.data");
  const auto q = GaussianVariational::from_flat(Family::FullRank, model.dim(),
                                                VectorXd::Zero(flat_size(Family::FullRank, model.dim())));
  Rng rng(5);
  const MatrixXd eps = sample_eps(model.dim(), state.range(0), rng);
  for (auto _ : state) benchmark::DoNotOptimize(grad_pathwise_stl(model, q, eps));
}
BENCHMARK(BM_StlLogisticFullRank)->Arg(8);

void BM_LogisticGradient(benchmark::State &state) {
  const auto model = load_wdbc(std::filesystem::path(SVI_DATA_DIR) / "wdbc.data");
  Rng rng(6);
  const VectorXd z = 0.1 * sample_eps(model.dim(), 1, rng).row(0).transpose();
  VectorXd grad;
  for (auto _ : state) benchmark::DoNotOptimize(model.log_joint_and_grad(z, grad));
}
BENCHMARK(BM_LogisticGradient);

} // namespace

BENCHMARK_MAIN();
