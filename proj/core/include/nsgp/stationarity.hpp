#pragma once

#include <cstdint>

#include "nsgp/data.hpp"
#include "nsgp/optimize.hpp"

namespace nsgp {

struct SpreadStats {
  double std_dev = 0.0;
  double iqr = 0.0;
};

struct NonStatConfig {
  int m_iterations = 100;
  int subset_size = 20;
  McmcConfig mcmc{/*n_iterations=*/1500, /*burn_in=*/300,
                  /*proposal_scale=*/{}, /*log_scale=*/{}, /*seed=*/0};
  std::uint64_t seed = 0;
  int n_threads = 0;
  double fixed_nugget = 1e-4;  // conditioning of the local subset fits
};

/// Distributions of locally fitted stationary-GP hyperparameters: one mean
/// signal variance and one mean length scale per iteration, plus spreads.
struct NonStatReport {
  std::vector<double> signal_variance_means;
  std::vector<double> length_scale_means;
  SpreadStats signal_variance_spread;
  SpreadStats length_scale_spread;

  int m_iterations = 0;
  int subset_size = 0;
  std::uint64_t seed = 0;
  int resampled_iterations = 0;  // degenerate subsets that had to be redrawn
};

/// Repeatedly draw a Gaussian blob of locations over the unit cube, map each
/// location to its nearest dataset point, fit a stationary isotropic Matern
/// 3/2 GP to the subset by MCMC, and record the mean signal variance and mean
/// length scale of the chain. Deterministic for a fixed seed; iterations run
/// independently on derived seeds.
NonStatReport measure_nonstationarity(const Dataset& dataset,
                                      const NonStatConfig& config);

enum class SpreadClass {
  LikelyStationary,
  WeaklyNonstationary,
  StronglyNonstationary
};

/// Thresholds on the coefficient of variation (std / mean) of the two
/// hyperparameter lists; the larger of the two decides.
struct SpreadThresholds {
  double stationary_below = 0.40;
  double strong_above = 0.90;
};

SpreadClass classify_spread(const NonStatReport& report,
                            const SpreadThresholds& thresholds = {});

std::string spread_class_name(SpreadClass c);

SpreadStats spread_stats(const std::vector<double>& values);

}  // namespace nsgp
