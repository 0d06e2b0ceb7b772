#include "nsgp/gp.hpp"

#include <cmath>
#include <numbers>

#include "nsgp/errors.hpp"

namespace nsgp {

Eigen::VectorXd CovarianceFactor::solve(const Eigen::VectorXd& rhs) const {
  Eigen::VectorXd u = chol_lower.triangularView<Eigen::Lower>().solve(rhs);
  return chol_lower.triangularView<Eigen::Lower>().transpose().solve(u);
}

double CovarianceFactor::log_det() const {
  return 2.0 * chol_lower.diagonal().array().log().sum();
}

GpModel::GpModel(Eigen::MatrixXd x, Eigen::VectorXd y, KernelSpec spec,
                 HyperVector hypers, std::optional<double> prior_mean)
    : x_(std::move(x)), y_(std::move(y)), spec_(std::move(spec)),
      hypers_(std::move(hypers)) {
  if (x_.rows() < 1 || x_.cols() < 1)
    throw DimensionError("GpModel: need at least one training point");
  if (y_.size() != x_.rows())
    throw DimensionError("GpModel: x rows and y entries must correspond one-to-one");
  spec_.validate();
  if (x_.cols() != spec_.dim)
    throw DimensionError("GpModel: training inputs have dimension " +
                         std::to_string(x_.cols()) + ", kernel expects " +
                         std::to_string(spec_.dim));
  hypers_.validate();
  prior_mean_ = prior_mean.value_or(y_.mean());
}

GpModel GpModel::with_hypers(const Eigen::VectorXd& values) const {
  if (values.size() != hypers_.values.size())
    throw DimensionError("GpModel::with_hypers: wrong hyperparameter count");
  GpModel m = *this;
  m.hypers_.values = values;
  m.chol_.reset();
  return m;
}

CovarianceFactor GpModel::factorize() const {
  Eigen::MatrixXd a = build_covariance(x_, x_, spec_, hypers_);
  a.diagonal().array() += total_nugget(spec_, hypers_);
  const double diag_mean = a.diagonal().mean();
  const double max_jitter = 1e-4 * diag_mean;

  double jitter = 0.0;
  while (true) {
    Eigen::MatrixXd attempt = a;
    if (jitter > 0.0) attempt.diagonal().array() += jitter;
    Eigen::LLT<Eigen::MatrixXd> llt(attempt);
    if (llt.info() == Eigen::Success)
      return CovarianceFactor{llt.matrixL(), jitter};
    const double next = jitter == 0.0 ? 1e-10 * diag_mean : jitter * 10.0;
    if (!(next > 0.0) || next > max_jitter)
      throw NotPositiveDefiniteError(
          "non-PSD covariance: Cholesky failed with jitter up to " +
              std::to_string(jitter),
          jitter);
    jitter = next;
  }
}

void GpModel::fit() { chol_ = factorize(); }

namespace {

const CovarianceFactor& factor_of(const GpModel& model, CovarianceFactor& scratch) {
  if (model.factor()) return *model.factor();
  scratch = model.factorize();
  return scratch;
}

}  // namespace

double log_marginal_likelihood(const GpModel& model) {
  CovarianceFactor scratch;
  const CovarianceFactor& f = factor_of(model, scratch);
  const Eigen::Index n = model.y_data().size();
  const Eigen::VectorXd r =
      model.y_data() - Eigen::VectorXd::Constant(n, model.prior_mean());
  const Eigen::VectorXd alpha = f.solve(r);
  return -0.5 * r.dot(alpha) - 0.5 * f.log_det() -
         0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
}

PosteriorSummary posterior(const GpModel& model, const Eigen::MatrixXd& x_query) {
  PosteriorSummary out;
  if (x_query.rows() == 0) {
    out.mean.resize(0);
    out.variance.resize(0);
    return out;
  }
  if (x_query.cols() != model.spec().dim)
    throw DimensionError("posterior: query dimension does not match the model");

  CovarianceFactor scratch;
  const CovarianceFactor& f = factor_of(model, scratch);
  const Eigen::Index n = model.y_data().size();
  const Eigen::Index q = x_query.rows();

  const Eigen::MatrixXd kappa =
      build_covariance(model.x_data(), x_query, model.spec(), model.hypers());
  const Eigen::VectorXd r =
      model.y_data() - Eigen::VectorXd::Constant(n, model.prior_mean());
  const Eigen::VectorXd alpha = f.solve(r);

  out.mean = Eigen::VectorXd::Constant(q, model.prior_mean()) + kappa.transpose() * alpha;

  // variance diag = k(xq, xq) - kappa^T (K+V)^{-1} kappa, via W = L^{-1} kappa
  const Eigen::MatrixXd w = f.chol_lower.triangularView<Eigen::Lower>().solve(kappa);
  out.variance.resize(q);
  for (Eigen::Index i = 0; i < q; ++i) {
    const Eigen::VectorXd xq = x_query.row(i).transpose();
    const double prior_var = kernel_value(model.spec(), model.hypers(), xq, xq);
    const double raw = prior_var - w.col(i).squaredNorm();
    if (raw < -1e-6) ++out.negative_variance_warnings;
    out.variance[i] = std::max(raw, 0.0);
  }
  return out;
}

}  // namespace nsgp
