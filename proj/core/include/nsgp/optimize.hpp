#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include "nsgp/gp.hpp"
#include "nsgp/metrics.hpp"

namespace nsgp {

using Objective = std::function<double(const Eigen::VectorXd&)>;

struct DeConfig {
  int population_size = 0;  // 0: 15 * dim, capped at 200, floor 4
  double mutation = 0.7;    // F
  double crossover = 0.9;   // CR
  int max_generations = 300;
  double tol = 1e-8;        // stop when per-dimension population spread drops below
  std::uint64_t seed = 0;
  int n_threads = 0;        // 0: hardware concurrency
};

struct DeResult {
  Eigen::VectorXd best;
  double best_value = 0.0;
  int generations = 0;
  std::int64_t n_evaluations = 0;
  bool converged = false;
};

using GenerationCallback =
    std::function<void(int generation, const Eigen::VectorXd& best, double best_value)>;

/// DE/rand/1/bin maximizer. Trial vectors are clipped to the bounds box.
/// Objectives that throw nsgp::Error or return non-finite values score -inf.
/// Deterministic for a fixed seed (trial generation is sequential; only the
/// pure fitness evaluations run in parallel).
DeResult differential_evolution(const Objective& objective,
                                const Eigen::VectorXd& lower,
                                const Eigen::VectorXd& upper,
                                const DeConfig& config,
                                const GenerationCallback& on_generation = {});

struct McmcConfig {
  std::int64_t n_iterations = 10000;
  std::int64_t burn_in = 2000;
  /// Per-dimension proposal step; a single entry broadcasts. For dimensions
  /// flagged in log_scale this is the step in log space.
  Eigen::VectorXd proposal_scale;
  /// Dimensions proposed on log scale (positive-constrained entries). Empty
  /// means all linear.
  std::vector<bool> log_scale;
  std::uint64_t seed = 0;
};

struct McmcResult {
  std::vector<Eigen::VectorXd> samples;  // post burn-in chain states
  Eigen::VectorXd sample_mean;
  double acceptance_rate = 0.0;
  bool zero_acceptance_warning = false;
};

using SampleCallback = std::function<void(std::int64_t iteration,
                                          const Eigen::VectorXd& state,
                                          double log_target_value)>;

/// Metropolis-Hastings acceptance probability for symmetric proposals.
double mh_acceptance_probability(double log_target_current, double log_target_proposed);

/// Random-walk Metropolis-Hastings with componentwise Gaussian steps and
/// reflection at the bounds. Log-scale dimensions walk in log space with the
/// Jacobian folded into the acceptance ratio, so the chain targets log_target
/// in the original coordinates. The callback sees the current state at every
/// iteration.
McmcResult mcmc_sample(const Objective& log_target, const Eigen::VectorXd& init,
                       const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                       const McmcConfig& config, const SampleCallback& on_sample = {});

/// One row of a metric-versus-time convergence trace.
struct TraceRecord {
  double wall_seconds = 0.0;
  double rmse = 0.0;
  double crps = 0.0;
  double log_likelihood = 0.0;
};

enum class FitMethod { DifferentialEvolution, Mcmc };

struct FitConfig {
  FitMethod method = FitMethod::DifferentialEvolution;
  DeConfig de;
  McmcConfig mcmc;
  int mcmc_trace_stride = 50;  // trace every DE generation, every N MCMC iterations
};

struct FitResult {
  GpModel model;  // fitted with the selected hyperparameters
  std::vector<TraceRecord> trace;
  double best_objective = 0.0;
  double mcmc_acceptance_rate = 0.0;  // MCMC only
};

/// Train the model's hyperparameters by maximizing the log marginal
/// likelihood, scoring RMSE/CRPS on the held-out set at every trace point.
/// DE keeps the best vector; MCMC keeps the mean of the post-burn-in samples.
FitResult fit_with_trace(const GpModel& model, const Eigen::MatrixXd& test_x,
                         const Eigen::VectorXd& test_y, const FitConfig& config);

/// CSV with header wall_seconds,rmse,crps,log_likelihood.
void write_trace_csv(std::ostream& out, const std::vector<TraceRecord>& trace);

}  // namespace nsgp
