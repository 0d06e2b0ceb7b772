#pragma once

#include <Eigen/Dense>
#include <optional>

#include "nsgp/kernels.hpp"

namespace nsgp {

/// Posterior mean and variance at a set of query points. Variances are
/// clamped at zero; raw values below -1e-6 are counted as warnings.
struct PosteriorSummary {
  Eigen::VectorXd mean;
  Eigen::VectorXd variance;
  int negative_variance_warnings = 0;
};

/// Cholesky factor of K + V (plus any conditioning jitter that was needed).
struct CovarianceFactor {
  Eigen::MatrixXd chol_lower;
  double applied_jitter = 0.0;

  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;
  double log_det() const;
};

/// Exact Gaussian-process regression model: normalized training data, a
/// constant prior mean, a kernel spec, and its hyperparameter vector. A
/// fitted model caches the Cholesky factor of K + V and is immutable from
/// then on; concurrent posterior queries on a fitted model are safe.
class GpModel {
public:
  GpModel() = default;

  /// prior_mean defaults to the arithmetic mean of y.
  GpModel(Eigen::MatrixXd x, Eigen::VectorXd y, KernelSpec spec,
          HyperVector hypers, std::optional<double> prior_mean = std::nullopt);

  const Eigen::MatrixXd& x_data() const noexcept { return x_; }
  const Eigen::VectorXd& y_data() const noexcept { return y_; }
  double prior_mean() const noexcept { return prior_mean_; }
  const KernelSpec& spec() const noexcept { return spec_; }
  const HyperVector& hypers() const noexcept { return hypers_; }

  /// Copy of this model with new hyperparameter values (cache dropped).
  GpModel with_hypers(const Eigen::VectorXd& values) const;

  /// Factorize K + V and cache the result.
  void fit();
  bool fitted() const noexcept { return chol_.has_value(); }
  const std::optional<CovarianceFactor>& factor() const noexcept { return chol_; }

  /// Factorization following the jitter ladder: on Cholesky failure add
  /// 1e-10 * mean(diag), escalating by 10x up to 1e-4 * mean(diag). Throws
  /// NotPositiveDefiniteError carrying the last attempted jitter.
  CovarianceFactor factorize() const;

private:
  Eigen::MatrixXd x_;
  Eigen::VectorXd y_;
  double prior_mean_ = 0.0;
  KernelSpec spec_;
  HyperVector hypers_;
  std::optional<CovarianceFactor> chol_;
};

/// -1/2 (y-m)^T (K+V)^{-1} (y-m) - 1/2 ln|K+V| - N/2 ln(2 pi).
double log_marginal_likelihood(const GpModel& model);

/// Posterior mean m0 + kappa^T (K+V)^{-1} (y-m) and variance
/// diag(Kqq) - kappa^T (K+V)^{-1} kappa at the query points.
PosteriorSummary posterior(const GpModel& model, const Eigen::MatrixXd& x_query);

}  // namespace nsgp
