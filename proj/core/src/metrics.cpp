#include "nsgp/metrics.hpp"

#include <cmath>
#include <numbers>

#include "nsgp/errors.hpp"

namespace nsgp {

namespace detail {

double normal_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

double normal_cdf(double z) {
  return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

}  // namespace detail

double rmse(const Eigen::VectorXd& y_true, const Eigen::VectorXd& y_pred) {
  if (y_true.size() == 0) throw Error("rmse: empty vectors");
  if (y_true.size() != y_pred.size())
    throw DimensionError("rmse: vector lengths differ");
  return std::sqrt((y_true - y_pred).squaredNorm() /
                   static_cast<double>(y_true.size()));
}

double crps_gaussian(double y, double mu, double sigma) {
  if (!(sigma > 0.0)) throw Error("crps_gaussian: sigma must be > 0");
  const double z = (y - mu) / sigma;
  return sigma * (1.0 / std::sqrt(std::numbers::pi) - 2.0 * detail::normal_pdf(z) -
                  z * (2.0 * detail::normal_cdf(z) - 1.0));
}

double mean_crps(const Eigen::VectorXd& y_true, const PosteriorSummary& summary) {
  if (y_true.size() != summary.mean.size())
    throw DimensionError("mean_crps: truth and summary lengths differ");
  if (y_true.size() == 0) throw Error("mean_crps: empty prediction set");
  double acc = 0.0;
  for (Eigen::Index i = 0; i < y_true.size(); ++i) {
    const double sigma = std::sqrt(std::max(summary.variance[i], 1e-12));
    acc += crps_gaussian(y_true[i], summary.mean[i], sigma);
  }
  return acc / static_cast<double>(y_true.size());
}

ScoreReport score_set(const Eigen::VectorXd& y_true, const PosteriorSummary& summary,
                      const GpModel& model) {
  ScoreReport report;
  report.rmse = rmse(y_true, summary.mean);
  report.crps_mean = mean_crps(y_true, summary);
  report.log_likelihood = log_marginal_likelihood(model);
  report.n_test = static_cast<int>(y_true.size());
  return report;
}

}  // namespace nsgp
