#include "nsgp/stationarity.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <thread>

#include "nsgp/errors.hpp"
#include "nsgp/gp.hpp"

namespace nsgp {

SpreadStats spread_stats(const std::vector<double>& values) {
  SpreadStats s;
  const std::size_t n = values.size();
  if (n < 2) return s;
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  s.std_dev = std::sqrt(ss / static_cast<double>(n - 1));

  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  auto quantile = [&](double p) {
    const double pos = p * static_cast<double>(n - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, n - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
  };
  s.iqr = quantile(0.75) - quantile(0.25);
  return s;
}

namespace {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  // splitmix64 finalizer
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Eigen::Index nearest_row(const Eigen::MatrixXd& points, const Eigen::VectorXd& q) {
  Eigen::Index best = 0;
  double best_d = (points.row(0).transpose() - q).squaredNorm();
  for (Eigen::Index i = 1; i < points.rows(); ++i) {
    const double d = (points.row(i).transpose() - q).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

struct LocalFit {
  double signal_variance_mean = 0.0;
  double length_scale_mean = 0.0;
  int resamples = 0;
};

LocalFit run_iteration(const Dataset& dataset, const NonStatConfig& config,
                       std::uint64_t iteration_seed) {
  const Eigen::Index dim = dataset.dim();
  std::mt19937_64 rng(iteration_seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  // A subset needs at least 5 distinct data points to say anything about a
  // two-hyperparameter GP; blobs that collapse below that are redrawn.
  const std::size_t min_unique = static_cast<std::size_t>(
      std::max(2, std::min(5, config.subset_size)));

  LocalFit fit;
  std::vector<Eigen::Index> subset;
  for (int redraw = 0; redraw < 100; ++redraw) {
    Eigen::VectorXd center(dim);
    for (Eigen::Index j = 0; j < dim; ++j) center[j] = unit(rng);
    const double std_dev = 1.0 - unit(rng);  // U((0, 1])

    subset.clear();
    for (int t = 0; t < config.subset_size; ++t) {
      Eigen::VectorXd loc(dim);
      for (Eigen::Index j = 0; j < dim; ++j) {
        double v = center[j] + std_dev * gauss(rng);
        for (int attempt = 0; attempt < 100 && (v < 0.0 || v > 1.0); ++attempt)
          v = center[j] + std_dev * gauss(rng);
        loc[j] = std::clamp(v, 0.0, 1.0);
      }
      subset.push_back(nearest_row(dataset.x, loc));
    }
    std::sort(subset.begin(), subset.end());
    subset.erase(std::unique(subset.begin(), subset.end()), subset.end());
    if (subset.size() >= min_unique) break;
    ++fit.resamples;  // degenerate: collapsed onto too few data points
  }
  if (subset.size() < min_unique)
    throw Error("measure_nonstationarity: could not draw a non-degenerate subset");

  Eigen::MatrixXd xs(static_cast<Eigen::Index>(subset.size()), dim);
  Eigen::VectorXd ys(static_cast<Eigen::Index>(subset.size()));
  for (std::size_t i = 0; i < subset.size(); ++i) {
    xs.row(static_cast<Eigen::Index>(i)) = dataset.x.row(subset[i]);
    ys[static_cast<Eigen::Index>(i)] = dataset.y[subset[i]];
  }

  KernelSpec spec;
  spec.family = KernelFamily::Matern32;
  spec.dim = static_cast<int>(dim);
  spec.fixed_nugget = config.fixed_nugget;

  HyperVector hypers = default_hypers(spec);
  // The dataset lives on the unit cube, so scales beyond a few units are
  // meaningless for a local subset; a tight box keeps the chain off the
  // sigma/length-scale likelihood ridge.
  hypers.lower.setConstant(1e-2);
  hypers.upper.setConstant(3.0);
  const double y_std = std::sqrt((ys.array() - ys.mean()).square().sum() /
                                 std::max<double>(1.0, static_cast<double>(ys.size() - 1)));
  hypers.set_scalar("sigma", std::clamp(y_std, 1e-2, 3.0));
  hypers.set_scalar("length_scale", 0.2);

  const GpModel model(xs, ys, spec, hypers);
  const Objective log_target = [&model](const Eigen::VectorXd& h) {
    return log_marginal_likelihood(model.with_hypers(h));
  };

  McmcConfig mcfg = config.mcmc;
  mcfg.seed = mix_seed(iteration_seed, 0x5eedULL);
  mcfg.log_scale = positive_scale_mask(hypers.layout);
  const McmcResult mc = mcmc_sample(log_target, hypers.values, hypers.lower,
                                    hypers.upper, mcfg);

  const int sigma_idx = hypers.layout.segment("sigma").offset;
  const int length_idx = hypers.layout.segment("length_scale").offset;
  double sv = 0.0, ls = 0.0;
  for (const auto& s : mc.samples) {
    sv += s[sigma_idx] * s[sigma_idx];  // signal variance is sigma^2
    ls += s[length_idx];
  }
  const double count = static_cast<double>(mc.samples.size());
  fit.signal_variance_mean = sv / count;
  fit.length_scale_mean = ls / count;
  return fit;
}

}  // namespace

NonStatReport measure_nonstationarity(const Dataset& dataset,
                                      const NonStatConfig& config) {
  if (config.m_iterations < 1)
    throw Error("measure_nonstationarity: m_iterations must be >= 1");
  if (config.subset_size < 5)
    throw Error("measure_nonstationarity: subset_size must be >= 5");
  if (dataset.rows() < 2)
    throw DataError("measure_nonstationarity: dataset has too few points");

  NonStatReport report;
  report.m_iterations = config.m_iterations;
  report.subset_size = config.subset_size;
  report.seed = config.seed;
  report.signal_variance_means.resize(config.m_iterations);
  report.length_scale_means.resize(config.m_iterations);

  std::atomic<int> resampled{0};
  int n_threads = config.n_threads > 0
                      ? config.n_threads
                      : static_cast<int>(std::thread::hardware_concurrency());
  if (n_threads < 1) n_threads = 1;
  n_threads = std::min(n_threads, config.m_iterations);

  auto worker = [&](int start) {
    for (int it = start; it < config.m_iterations; it += n_threads) {
      const LocalFit fit =
          run_iteration(dataset, config, mix_seed(config.seed, static_cast<std::uint64_t>(it)));
      report.signal_variance_means[it] = fit.signal_variance_mean;
      report.length_scale_means[it] = fit.length_scale_mean;
      if (fit.resamples > 0) resampled += fit.resamples;
    }
  };
  if (n_threads <= 1) {
    worker(0);
  } else {
    std::vector<std::thread> threads;
    threads.reserve(n_threads);
    for (int t = 0; t < n_threads; ++t) threads.emplace_back(worker, t);
    for (auto& t : threads) t.join();
  }

  report.resampled_iterations = resampled.load();
  report.signal_variance_spread = spread_stats(report.signal_variance_means);
  report.length_scale_spread = spread_stats(report.length_scale_means);
  return report;
}

SpreadClass classify_spread(const NonStatReport& report,
                            const SpreadThresholds& thresholds) {
  if (report.signal_variance_means.empty())
    throw Error("classify_spread: empty report");
  auto cov = [](const std::vector<double>& values, double spread) {
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    return mean > 0.0 ? spread / mean : 0.0;
  };
  const double c = std::max(
      cov(report.signal_variance_means, report.signal_variance_spread.std_dev),
      cov(report.length_scale_means, report.length_scale_spread.std_dev));
  if (c < thresholds.stationary_below) return SpreadClass::LikelyStationary;
  if (c > thresholds.strong_above) return SpreadClass::StronglyNonstationary;
  return SpreadClass::WeaklyNonstationary;
}

std::string spread_class_name(SpreadClass c) {
  switch (c) {
    case SpreadClass::LikelyStationary: return "likely-stationary";
    case SpreadClass::WeaklyNonstationary: return "weakly-nonstationary";
    case SpreadClass::StronglyNonstationary: return "strongly-nonstationary";
  }
  throw Error("spread_class_name: unknown class");
}

}  // namespace nsgp
