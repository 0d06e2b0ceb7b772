#include <benchmark/benchmark.h>

#include <random>

#include "nsgp/data.hpp"
#include "nsgp/gp.hpp"
#include "nsgp/metrics.hpp"
#include "nsgp/optimize.hpp"

using namespace nsgp;

namespace {

KernelSpec spec_for(const std::string& kind, int dim) {
  KernelSpec spec;
  spec.dim = dim;
  spec.fixed_nugget = 1e-3;
  if (kind == "matern32") {
    spec.family = KernelFamily::Matern32;
  } else if (kind == "parametric") {
    spec.family = KernelFamily::ParametricNS;
    spec.basis_centers.resize(6, 1);
    spec.basis_centers << 0.0, 0.2, 0.4, 0.6, 0.8, 1.0;
  } else if (kind == "deep") {
    spec.family = KernelFamily::Deep;
    spec.net_shape = {1, 5, 5, 1};
  } else {
    spec.family = KernelFamily::HybridParametricDeep;
    spec.basis_centers.resize(6, 1);
    spec.basis_centers << 0.0, 0.2, 0.4, 0.6, 0.8, 1.0;
    spec.net_shape = {1, 5, 5, 1};
  }
  return spec;
}

Eigen::MatrixXd random_points(int n, int dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::MatrixXd x(n, dim);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < dim; ++j) x(i, j) = unit(rng);
  return x;
}

void BM_BuildCovariance(benchmark::State& state, const std::string& kind) {
  const int n = static_cast<int>(state.range(0));
  const KernelSpec spec = spec_for(kind, 1);
  const HyperVector hypers = default_hypers(spec);
  const Eigen::MatrixXd x = random_points(n, 1, 7);
  for (auto _ : state) {
    Eigen::MatrixXd k = build_covariance(x, x, spec, hypers);
    benchmark::DoNotOptimize(k.data());
  }
  state.SetComplexityN(n);
}

void BM_LogMarginalLikelihood(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const KernelSpec spec = spec_for("matern32", 1);
  const Dataset data = synth_1d(n, 1e-3, 3);
  const GpModel model(data.x, data.y, spec, default_hypers(spec));
  for (auto _ : state) {
    benchmark::DoNotOptimize(log_marginal_likelihood(model));
  }
  state.SetComplexityN(n);
}

void BM_Posterior(benchmark::State& state) {
  const int q = static_cast<int>(state.range(0));
  const KernelSpec spec = spec_for("matern32", 1);
  const Dataset data = synth_1d(50, 1e-3, 3);
  GpModel model(data.x, data.y, spec, default_hypers(spec));
  model.fit();
  const Eigen::MatrixXd xq = random_points(q, 1, 11);
  for (auto _ : state) {
    const PosteriorSummary s = posterior(model, xq);
    benchmark::DoNotOptimize(s.mean.data());
  }
  state.SetComplexityN(q);
}

void BM_CrpsGaussian(benchmark::State& state) {
  double y = 0.3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(crps_gaussian(y, 0.1, 0.4));
    y += 1e-9;
  }
}

void BM_DeGeneration(benchmark::State& state) {
  // one full DE run on the 2-hyperparameter likelihood, per-iteration cost
  const KernelSpec spec = spec_for("matern32", 1);
  const Dataset data = synth_1d(50, 1e-3, 3);
  const GpModel model(data.x, data.y, spec, default_hypers(spec));
  const Objective objective = [&](const Eigen::VectorXd& h) {
    return log_marginal_likelihood(model.with_hypers(h));
  };
  for (auto _ : state) {
    DeConfig cfg;
    cfg.seed = 5;
    cfg.max_generations = 10;
    cfg.n_threads = 1;
    const DeResult r = differential_evolution(objective, model.hypers().lower,
                                              model.hypers().upper, cfg);
    benchmark::DoNotOptimize(r.best_value);
  }
}

}  // namespace

BENCHMARK_CAPTURE(BM_BuildCovariance, matern32, "matern32")
    ->RangeMultiplier(2)
    ->Range(16, 256)
    ->Complexity();
BENCHMARK_CAPTURE(BM_BuildCovariance, parametric, "parametric")
    ->RangeMultiplier(2)
    ->Range(16, 256)
    ->Complexity();
BENCHMARK_CAPTURE(BM_BuildCovariance, deep, "deep")
    ->RangeMultiplier(2)
    ->Range(16, 256)
    ->Complexity();
BENCHMARK_CAPTURE(BM_BuildCovariance, hybrid, "hybrid")
    ->RangeMultiplier(2)
    ->Range(16, 256)
    ->Complexity();
BENCHMARK(BM_LogMarginalLikelihood)->RangeMultiplier(2)->Range(16, 256)->Complexity();
BENCHMARK(BM_Posterior)->RangeMultiplier(4)->Range(16, 1024)->Complexity();
BENCHMARK(BM_CrpsGaussian);
BENCHMARK(BM_DeGeneration);

BENCHMARK_MAIN();
