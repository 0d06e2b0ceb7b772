#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "nsgp/warp_net.hpp"

namespace nsgp {

enum class KernelFamily {
  Exponential,          // sigma_s * exp(-0.5 d / l)
  RBF,                  // sigma_s * exp(-0.5 d^2 / l^2)
  Matern32,             // sigma^2 (1 + sqrt(3) d / l) exp(-sqrt(3) d / l)
  Matern32Ard,          // Matern 3/2 over the anisotropic distance, one scale per axis
  ParametricNS,         // sum_a g_a(x_i) g_a(x_j) * unit-amplitude Matern32
  Deep,                 // Matern32(sigma, l) on network-warped inputs
  HybridParametricDeep  // g-product amplitude times the deep kernel
};

std::string family_name(KernelFamily family);
KernelFamily family_from_name(const std::string& name);

/// Structural description of a kernel: which family, input dimension, and the
/// constants that determine its hyperparameter layout (basis centers, number
/// of g functions, warp-net shape, nugget handling).
struct KernelSpec {
  KernelFamily family = KernelFamily::Matern32;
  int dim = 1;

  /// Basis-function centers, one per row (ParametricNS / Hybrid).
  Eigen::MatrixXd basis_centers;
  /// Number of g functions in the amplitude sum. The hybrid kernel uses 2.
  int num_g = 2;

  /// Full layer-width list of the warping network, e.g. {1, 5, 5, 1}
  /// (Deep / Hybrid). Input and output widths must equal dim.
  std::vector<int> net_shape;

  /// Observation-noise variance pinned by the configuration (not trained).
  double fixed_nugget = 0.0;
  /// Appends a trained nugget variance to the hyperparameter vector.
  bool trainable_nugget = false;

  void validate() const;  // throws DimensionError on inconsistency

  bool uses_basis() const noexcept {
    return family == KernelFamily::ParametricNS ||
           family == KernelFamily::HybridParametricDeep;
  }
  bool uses_net() const noexcept {
    return family == KernelFamily::Deep ||
           family == KernelFamily::HybridParametricDeep;
  }
};

struct HyperSegment {
  std::string name;
  int offset = 0;
  int size = 0;
};

struct HyperLayout {
  std::vector<HyperSegment> segments;

  int total() const noexcept;
  bool has(const std::string& name) const noexcept;
  const HyperSegment& segment(const std::string& name) const;  // throws Error
};

/// Flat ordered hyperparameter vector with its named layout and box bounds.
struct HyperVector {
  Eigen::VectorXd values;
  HyperLayout layout;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  double scalar(const std::string& name) const;
  Eigen::VectorXd segment_values(const std::string& name) const;
  void set_scalar(const std::string& name, double v);
  void set_segment(const std::string& name, const Eigen::VectorXd& v);

  void validate() const;  // sizes agree, values inside bounds up to clipping
};

/// Named segment layout for a spec. Totals reproduce the hyperparameter
/// counts of the reference configurations (2/15/48 in 1-D, 3/58/186 in 3-D).
HyperLayout hyper_layout(const KernelSpec& spec);

/// Default box bounds: scale-like entries in [1e-3, 1e2], basis coefficients
/// in [-2, 2], network weights and biases in [-5, 5].
void default_bounds(const KernelSpec& spec, Eigen::VectorXd& lower,
                    Eigen::VectorXd& upper);

/// Layout, default bounds, and a neutral starting point.
HyperVector default_hypers(const KernelSpec& spec);

/// True for entries that are positive-constrained scales (sigma, length
/// scales, basis widths, nugget). Used to switch MCMC proposals to log scale.
std::vector<bool> positive_scale_mask(const HyperLayout& layout);

/// Plain stationary kernels as a function of distance d >= 0. Exponential and
/// RBF apply sigma linearly; Matern 3/2 applies sigma squared.
double eval_stationary(KernelFamily family, double d, double sigma, double length);

/// g(x) = sum_k c_k exp(-0.5 ||center_k - x||^2 / width), centers one per row.
double eval_g(const Eigen::VectorXd& x, const Eigen::VectorXd& coeffs,
              const Eigen::MatrixXd& centers, double width);

/// Anisotropic distance ((x_i-x_j)^T diag(m) (x_i-x_j))^{1/2}.
double anisotropic_distance(const Eigen::VectorXd& xi, const Eigen::VectorXd& xj,
                            const Eigen::VectorXd& m_diag);

double eval_parametric_ns(const Eigen::VectorXd& xi, const Eigen::VectorXd& xj,
                          const KernelSpec& spec, const HyperVector& hypers);

double eval_deep(const Eigen::VectorXd& xi, const Eigen::VectorXd& xj,
                 const HyperVector& hypers, const WarpNet& net);

double eval_hybrid(const Eigen::VectorXd& xi, const Eigen::VectorXd& xj,
                   const KernelSpec& spec, const HyperVector& hypers,
                   const WarpNet& net);

/// Single kernel entry k(x_i, x_j) for any family.
double kernel_value(const KernelSpec& spec, const HyperVector& hypers,
                    const Eigen::VectorXd& xi, const Eigen::VectorXd& xj);

/// A x B covariance block with entry (i,j) = k(x1_i, x2_j). Warped inputs and
/// g values are computed once per row, not once per pair.
Eigen::MatrixXd build_covariance(const Eigen::MatrixXd& x1,
                                 const Eigen::MatrixXd& x2,
                                 const KernelSpec& spec,
                                 const HyperVector& hypers);

/// Trained plus pinned observation-noise variance for this spec/hypers pair.
double total_nugget(const KernelSpec& spec, const HyperVector& hypers);

}  // namespace nsgp
