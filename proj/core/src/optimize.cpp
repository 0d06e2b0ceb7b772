#include "nsgp/optimize.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>
#include <thread>

#include "nsgp/errors.hpp"

namespace nsgp {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double safe_eval(const Objective& objective, const Eigen::VectorXd& x) {
  double v;
  try {
    v = objective(x);
  } catch (const Error&) {
    return kNegInf;  // rejected, e.g. non-PSD covariance
  }
  return std::isfinite(v) ? v : kNegInf;
}

void parallel_for(int n, int n_threads, const std::function<void(int)>& body) {
  if (n_threads <= 0) {
    n_threads = static_cast<int>(std::thread::hardware_concurrency());
    if (n_threads < 1) n_threads = 1;
  }
  n_threads = std::min(n_threads, n);
  if (n_threads <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> workers;
  workers.reserve(n_threads);
  for (int t = 0; t < n_threads; ++t) {
    workers.emplace_back([&, t]() {
      for (int i = t; i < n; i += n_threads) body(i);
    });
  }
  for (auto& w : workers) w.join();
}

double reflect(double v, double lo, double hi) {
  if (lo == hi) return lo;
  for (int guard = 0; guard < 128 && (v < lo || v > hi); ++guard) {
    if (v > hi) v = 2.0 * hi - v;
    if (v < lo) v = 2.0 * lo - v;
  }
  return std::clamp(v, lo, hi);
}

}  // namespace

DeResult differential_evolution(const Objective& objective,
                                const Eigen::VectorXd& lower,
                                const Eigen::VectorXd& upper,
                                const DeConfig& config,
                                const GenerationCallback& on_generation) {
  const int dim = static_cast<int>(lower.size());
  if (dim < 1 || upper.size() != dim)
    throw DimensionError("differential_evolution: malformed bounds");
  for (int j = 0; j < dim; ++j)
    if (!std::isfinite(lower[j]) || !std::isfinite(upper[j]) || lower[j] > upper[j])
      throw Error("differential_evolution: bounds must be finite with lower <= upper");

  int np = config.population_size > 0 ? config.population_size
                                      : std::min(15 * dim, 200);
  np = std::max(np, 4);

  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<Eigen::VectorXd> population(np, Eigen::VectorXd(dim));
  for (int i = 0; i < np; ++i)
    for (int j = 0; j < dim; ++j)
      population[i][j] = lower[j] + (upper[j] - lower[j]) * unit(rng);

  std::vector<double> fitness(np);
  parallel_for(np, config.n_threads,
               [&](int i) { fitness[i] = safe_eval(objective, population[i]); });
  std::int64_t n_evals = np;

  DeResult result;
  auto update_best = [&]() {
    const auto it = std::max_element(fitness.begin(), fitness.end());
    const int idx = static_cast<int>(it - fitness.begin());
    if (result.best.size() == 0 || fitness[idx] > result.best_value) {
      result.best = population[idx];
      result.best_value = fitness[idx];
    }
  };
  result.best_value = kNegInf;
  update_best();

  std::vector<Eigen::VectorXd> trials(np, Eigen::VectorXd(dim));
  std::vector<double> trial_fitness(np);
  std::uniform_int_distribution<int> pick(0, np - 1);
  std::uniform_int_distribution<int> pick_dim(0, dim - 1);

  for (int gen = 1; gen <= config.max_generations; ++gen) {
    // Trial generation stays sequential so the RNG stream is schedule-free.
    for (int i = 0; i < np; ++i) {
      int r0, r1, r2;
      do { r0 = pick(rng); } while (r0 == i);
      do { r1 = pick(rng); } while (r1 == i || r1 == r0);
      do { r2 = pick(rng); } while (r2 == i || r2 == r0 || r2 == r1);
      const int j_rand = pick_dim(rng);
      Eigen::VectorXd& trial = trials[i];
      for (int j = 0; j < dim; ++j) {
        if (unit(rng) < config.crossover || j == j_rand) {
          const double v =
              population[r0][j] + config.mutation * (population[r1][j] - population[r2][j]);
          trial[j] = std::clamp(v, lower[j], upper[j]);
        } else {
          trial[j] = population[i][j];
        }
      }
    }

    parallel_for(np, config.n_threads,
                 [&](int i) { trial_fitness[i] = safe_eval(objective, trials[i]); });
    n_evals += np;

    for (int i = 0; i < np; ++i) {
      if (trial_fitness[i] >= fitness[i]) {
        population[i] = trials[i];
        fitness[i] = trial_fitness[i];
      }
    }
    update_best();
    result.generations = gen;
    if (on_generation) on_generation(gen, result.best, result.best_value);

    double spread = 0.0;
    for (int j = 0; j < dim; ++j) {
      double lo = population[0][j], hi = population[0][j];
      for (int i = 1; i < np; ++i) {
        lo = std::min(lo, population[i][j]);
        hi = std::max(hi, population[i][j]);
      }
      spread = std::max(spread, hi - lo);
    }
    if (spread < config.tol) {
      result.converged = true;
      break;
    }
  }

  result.n_evaluations = n_evals;
  return result;
}

double mh_acceptance_probability(double log_target_current, double log_target_proposed) {
  return std::min(1.0, std::exp(log_target_proposed - log_target_current));
}

McmcResult mcmc_sample(const Objective& log_target, const Eigen::VectorXd& init,
                       const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                       const McmcConfig& config, const SampleCallback& on_sample) {
  const int dim = static_cast<int>(init.size());
  if (dim < 1 || lower.size() != dim || upper.size() != dim)
    throw DimensionError("mcmc_sample: malformed init or bounds");
  if (config.burn_in >= config.n_iterations)
    throw Error("mcmc_sample: burn_in must be smaller than n_iterations");

  Eigen::VectorXd scale;
  if (config.proposal_scale.size() == dim) scale = config.proposal_scale;
  else if (config.proposal_scale.size() == 1)
    scale = Eigen::VectorXd::Constant(dim, config.proposal_scale[0]);
  else if (config.proposal_scale.size() == 0)
    scale = Eigen::VectorXd::Constant(dim, 0.25);
  else
    throw DimensionError("mcmc_sample: proposal_scale must broadcast or match dim");
  if ((scale.array() <= 0.0).any())
    throw Error("mcmc_sample: proposal_scale must be > 0");

  std::vector<bool> log_dims = config.log_scale;
  if (log_dims.empty()) log_dims.assign(dim, false);
  if (static_cast<int>(log_dims.size()) != dim)
    throw DimensionError("mcmc_sample: log_scale mask length mismatch");

  // Chain coordinates: z_i = log(x_i) on log dimensions, x_i otherwise.
  Eigen::VectorXd zlo(dim), zhi(dim), z(dim);
  for (int j = 0; j < dim; ++j) {
    if (log_dims[j]) {
      if (!(lower[j] > 0.0))
        throw Error("mcmc_sample: log-scale dimension needs a positive lower bound");
      zlo[j] = std::log(lower[j]);
      zhi[j] = std::log(upper[j]);
      z[j] = std::log(std::clamp(init[j], lower[j], upper[j]));
    } else {
      zlo[j] = lower[j];
      zhi[j] = upper[j];
      z[j] = std::clamp(init[j], lower[j], upper[j]);
    }
  }
  auto to_x = [&](const Eigen::VectorXd& zv) {
    Eigen::VectorXd x = zv;
    for (int j = 0; j < dim; ++j)
      if (log_dims[j]) x[j] = std::exp(zv[j]);
    return x;
  };

  Eigen::VectorXd x = to_x(z);
  double lt = safe_eval(log_target, x);
  if (!std::isfinite(lt))
    throw Error("mcmc_sample: log target is not finite at the initial state");

  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  McmcResult result;
  result.samples.reserve(static_cast<std::size_t>(config.n_iterations - config.burn_in));
  std::int64_t accepted = 0;

  for (std::int64_t it = 0; it < config.n_iterations; ++it) {
    Eigen::VectorXd z_prop = z;
    for (int j = 0; j < dim; ++j)
      z_prop[j] = reflect(z[j] + scale[j] * gauss(rng), zlo[j], zhi[j]);
    const Eigen::VectorXd x_prop = to_x(z_prop);
    const double lt_prop = safe_eval(log_target, x_prop);

    // Jacobian of the log transform keeps the chain targeting x-space.
    double log_jacobian = 0.0;
    for (int j = 0; j < dim; ++j)
      if (log_dims[j]) log_jacobian += z_prop[j] - z[j];

    const double log_ratio = lt_prop - lt + log_jacobian;
    const double u = unit(rng);
    if (std::log(u) < std::min(0.0, log_ratio)) {
      z = z_prop;
      x = x_prop;
      lt = lt_prop;
      ++accepted;
    }
    if (on_sample) on_sample(it, x, lt);
    if (it >= config.burn_in) result.samples.push_back(x);
  }

  result.acceptance_rate =
      static_cast<double>(accepted) / static_cast<double>(config.n_iterations);
  result.zero_acceptance_warning = accepted == 0;
  result.sample_mean = Eigen::VectorXd::Zero(dim);
  for (const auto& s : result.samples) result.sample_mean += s;
  if (!result.samples.empty())
    result.sample_mean /= static_cast<double>(result.samples.size());
  return result;
}

FitResult fit_with_trace(const GpModel& model, const Eigen::MatrixXd& test_x,
                         const Eigen::VectorXd& test_y, const FitConfig& config) {
  if (test_x.rows() != test_y.size())
    throw DimensionError("fit_with_trace: test inputs and targets disagree");
  const auto t0 = std::chrono::steady_clock::now();

  const Objective objective = [&model](const Eigen::VectorXd& h) {
    return log_marginal_likelihood(model.with_hypers(h));
  };

  FitResult result;
  auto emit = [&](const Eigen::VectorXd& h) {
    try {
      const GpModel m = model.with_hypers(h);
      TraceRecord rec;
      rec.wall_seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      rec.log_likelihood = log_marginal_likelihood(m);
      const PosteriorSummary summary = posterior(m, test_x);
      rec.rmse = rmse(test_y, summary.mean);
      rec.crps = mean_crps(test_y, summary);
      result.trace.push_back(rec);
    } catch (const Error&) {
      // skipped evaluation; the optimizer already scored it -inf
    }
  };

  Eigen::VectorXd final_hypers;
  if (config.method == FitMethod::DifferentialEvolution) {
    const DeResult de = differential_evolution(
        objective, model.hypers().lower, model.hypers().upper, config.de,
        [&](int, const Eigen::VectorXd& best, double) { emit(best); });
    final_hypers = de.best;
    result.best_objective = de.best_value;
  } else {
    McmcConfig mcfg = config.mcmc;
    if (mcfg.log_scale.empty())
      mcfg.log_scale = positive_scale_mask(model.hypers().layout);
    const int stride = std::max(config.mcmc_trace_stride, 1);
    const McmcResult mc = mcmc_sample(
        objective, model.hypers().values, model.hypers().lower,
        model.hypers().upper, mcfg,
        [&](std::int64_t it, const Eigen::VectorXd& state, double) {
          if (it % stride == 0) emit(state);
        });
    final_hypers = mc.sample_mean;
    result.mcmc_acceptance_rate = mc.acceptance_rate;
    result.best_objective = safe_eval(objective, final_hypers);
  }

  result.model = model.with_hypers(final_hypers);
  result.model.fit();
  return result;
}

void write_trace_csv(std::ostream& out, const std::vector<TraceRecord>& trace) {
  out << "wall_seconds,rmse,crps,log_likelihood\n";
  out.precision(17);
  for (const auto& r : trace)
    out << r.wall_seconds << ',' << r.rmse << ',' << r.crps << ','
        << r.log_likelihood << '\n';
}

}  // namespace nsgp
