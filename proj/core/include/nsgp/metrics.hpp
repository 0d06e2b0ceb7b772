#pragma once

#include <Eigen/Dense>

#include "nsgp/gp.hpp"

namespace nsgp {

struct ScoreReport {
  double rmse = 0.0;
  double crps_mean = 0.0;
  double log_likelihood = 0.0;
  int n_test = 0;
};

double rmse(const Eigen::VectorXd& y_true, const Eigen::VectorXd& y_pred);

/// Gaussian CRPS in the convention used here: negative, approaching zero as
/// the forecast sharpens around the truth. With z = (y - mu) / sigma,
///   crps = sigma * (1/sqrt(pi) - 2 pdf(z) - z (2 cdf(z) - 1)).
/// This is the negative of the positively oriented textbook CRPS.
double crps_gaussian(double y, double mu, double sigma);

/// Mean CRPS over a prediction set; per-point variance floored at 1e-12
/// before taking the square root.
double mean_crps(const Eigen::VectorXd& y_true, const PosteriorSummary& summary);

/// RMSE and mean CRPS of a posterior against held-out truth, plus the log
/// marginal likelihood of the model on its training data.
ScoreReport score_set(const Eigen::VectorXd& y_true, const PosteriorSummary& summary,
                      const GpModel& model);

namespace detail {
double normal_pdf(double z);
double normal_cdf(double z);
}  // namespace detail

}  // namespace nsgp
