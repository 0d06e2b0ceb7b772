#include "nsgp/kernels.hpp"

#include <cmath>
#include <limits>

#include "nsgp/errors.hpp"

namespace nsgp {

namespace {

constexpr double kSqrt3 = 1.7320508075688772;

double matern32(double d, double sigma, double length) {
  const double t = kSqrt3 * d / length;
  return sigma * sigma * (1.0 + t) * std::exp(-t);
}

}  // namespace

std::string family_name(KernelFamily family) {
  switch (family) {
    case KernelFamily::Exponential: return "exponential";
    case KernelFamily::RBF: return "rbf";
    case KernelFamily::Matern32: return "matern32";
    case KernelFamily::Matern32Ard: return "matern32_ard";
    case KernelFamily::ParametricNS: return "parametric_ns";
    case KernelFamily::Deep: return "deep";
    case KernelFamily::HybridParametricDeep: return "hybrid";
  }
  throw Error("family_name: unknown kernel family");
}

KernelFamily family_from_name(const std::string& name) {
  if (name == "exponential") return KernelFamily::Exponential;
  if (name == "rbf") return KernelFamily::RBF;
  if (name == "matern32" || name == "stationary") return KernelFamily::Matern32;
  if (name == "matern32_ard") return KernelFamily::Matern32Ard;
  if (name == "parametric_ns" || name == "parametric") return KernelFamily::ParametricNS;
  if (name == "deep") return KernelFamily::Deep;
  if (name == "hybrid") return KernelFamily::HybridParametricDeep;
  throw Error("unknown kernel family name: '" + name + "'");
}

void KernelSpec::validate() const {
  if (dim < 1) throw DimensionError("KernelSpec: dim must be >= 1");
  if (uses_basis()) {
    if (basis_centers.rows() < 1)
      throw DimensionError("KernelSpec: " + family_name(family) +
                           " requires basis centers");
    if (basis_centers.cols() != dim)
      throw DimensionError("KernelSpec: basis centers have dimension " +
                           std::to_string(basis_centers.cols()) + ", expected " +
                           std::to_string(dim));
    if (num_g < 1) throw DimensionError("KernelSpec: num_g must be >= 1");
  }
  if (uses_net()) {
    if (net_shape.size() < 2)
      throw DimensionError("KernelSpec: " + family_name(family) +
                           " requires a net shape");
    if (net_shape.front() != dim || net_shape.back() != dim)
      throw DimensionError(
          "KernelSpec: warp net must map dim -> dim (same dimensionality)");
    for (int w : net_shape)
      if (w < 1) throw DimensionError("KernelSpec: net layer widths must be >= 1");
  }
  if (fixed_nugget < 0.0)
    throw DimensionError("KernelSpec: fixed_nugget must be >= 0");
}

int HyperLayout::total() const noexcept {
  int n = 0;
  for (const auto& s : segments) n += s.size;
  return n;
}

bool HyperLayout::has(const std::string& name) const noexcept {
  for (const auto& s : segments)
    if (s.name == name) return true;
  return false;
}

const HyperSegment& HyperLayout::segment(const std::string& name) const {
  for (const auto& s : segments)
    if (s.name == name) return s;
  throw Error("HyperLayout: no segment named '" + name + "'");
}

double HyperVector::scalar(const std::string& name) const {
  const HyperSegment& s = layout.segment(name);
  if (s.size != 1) throw Error("HyperVector: segment '" + name + "' is not scalar");
  return values[s.offset];
}

Eigen::VectorXd HyperVector::segment_values(const std::string& name) const {
  const HyperSegment& s = layout.segment(name);
  return values.segment(s.offset, s.size);
}

void HyperVector::set_scalar(const std::string& name, double v) {
  const HyperSegment& s = layout.segment(name);
  if (s.size != 1) throw Error("HyperVector: segment '" + name + "' is not scalar");
  values[s.offset] = v;
}

void HyperVector::set_segment(const std::string& name, const Eigen::VectorXd& v) {
  const HyperSegment& s = layout.segment(name);
  if (v.size() != s.size)
    throw DimensionError("HyperVector: segment '" + name + "' has size " +
                         std::to_string(s.size) + ", got " + std::to_string(v.size()));
  values.segment(s.offset, s.size) = v;
}

void HyperVector::validate() const {
  const int n = layout.total();
  if (values.size() != n || lower.size() != n || upper.size() != n)
    throw DimensionError("HyperVector: values/layout/bounds lengths disagree");
  for (int i = 0; i < n; ++i)
    if (!(lower[i] <= upper[i]))
      throw Error("HyperVector: malformed bounds at index " + std::to_string(i));
}

HyperLayout hyper_layout(const KernelSpec& spec) {
  spec.validate();
  HyperLayout layout;
  int off = 0;
  auto add = [&](const std::string& name, int size) {
    layout.segments.push_back({name, off, size});
    off += size;
  };

  switch (spec.family) {
    case KernelFamily::Exponential:
    case KernelFamily::RBF:
    case KernelFamily::Matern32:
      add("sigma", 1);
      add("length_scale", 1);
      break;
    case KernelFamily::Matern32Ard:
      add("sigma", 1);
      add("ard_scales", spec.dim);
      break;
    case KernelFamily::ParametricNS: {
      const int n_centers = static_cast<int>(spec.basis_centers.rows());
      for (int a = 0; a < spec.num_g; ++a)
        add("g" + std::to_string(a) + "_coeffs", n_centers);
      add("g_widths", spec.num_g);
      add("length_scale", 1);
      break;
    }
    case KernelFamily::Deep:
      add("net_params", static_cast<int>(WarpNet::parameter_count(spec.net_shape)));
      add("sigma", 1);
      add("length_scale", 1);
      break;
    case KernelFamily::HybridParametricDeep: {
      const int n_centers = static_cast<int>(spec.basis_centers.rows());
      for (int a = 0; a < spec.num_g; ++a)
        add("g" + std::to_string(a) + "_coeffs", n_centers);
      add("g_widths", spec.num_g);
      add("net_params", static_cast<int>(WarpNet::parameter_count(spec.net_shape)));
      add("sigma", 1);
      add("length_scale", 1);
      break;
    }
  }
  if (spec.trainable_nugget) add("nugget", 1);
  return layout;
}

void default_bounds(const KernelSpec& spec, Eigen::VectorXd& lower,
                    Eigen::VectorXd& upper) {
  const HyperLayout layout = hyper_layout(spec);
  const int n = layout.total();
  lower.resize(n);
  upper.resize(n);
  for (const auto& s : layout.segments) {
    double lo, hi;
    if (s.name == "net_params") {
      lo = -5.0;
      hi = 5.0;
    } else if (s.name.rfind("g", 0) == 0 && s.name.find("coeffs") != std::string::npos) {
      lo = -2.0;
      hi = 2.0;
    } else {
      lo = 1e-3;  // sigma, length scales, widths, nugget
      hi = 1e2;
    }
    lower.segment(s.offset, s.size).setConstant(lo);
    upper.segment(s.offset, s.size).setConstant(hi);
  }
}

HyperVector default_hypers(const KernelSpec& spec) {
  HyperVector h;
  h.layout = hyper_layout(spec);
  default_bounds(spec, h.lower, h.upper);
  h.values.resize(h.layout.total());
  for (const auto& s : h.layout.segments) {
    double v;
    if (s.name == "sigma") v = 1.0;
    else if (s.name == "length_scale" || s.name == "ard_scales") v = 0.3;
    else if (s.name == "g_widths") v = 0.3;
    else if (s.name == "net_params") v = 0.1;
    else if (s.name == "nugget") v = 0.01;
    else v = 0.5;  // basis coefficients
    h.values.segment(s.offset, s.size).setConstant(v);
  }
  return h;
}

std::vector<bool> positive_scale_mask(const HyperLayout& layout) {
  std::vector<bool> mask(layout.total(), false);
  for (const auto& s : layout.segments) {
    const bool positive = s.name == "sigma" || s.name == "length_scale" ||
                          s.name == "ard_scales" || s.name == "g_widths" ||
                          s.name == "nugget";
    if (!positive) continue;
    for (int i = 0; i < s.size; ++i) mask[s.offset + i] = true;
  }
  return mask;
}

double eval_stationary(KernelFamily family, double d, double sigma, double length) {
  if (!std::isfinite(d) || !std::isfinite(sigma) || !std::isfinite(length))
    throw Error("eval_stationary: non-finite input");
  if (d < 0.0) throw Error("eval_stationary: negative distance");
  if (length <= 0.0) throw Error("eval_stationary: length scale must be > 0");
  switch (family) {
    case KernelFamily::Exponential:
      return sigma * std::exp(-0.5 * d / length);
    case KernelFamily::RBF:
      return sigma * std::exp(-0.5 * d * d / (length * length));
    case KernelFamily::Matern32:
      return matern32(d, sigma, length);
    default:
      throw Error("eval_stationary: not a plain stationary family");
  }
}

double eval_g(const Eigen::VectorXd& x, const Eigen::VectorXd& coeffs,
              const Eigen::MatrixXd& centers, double width) {
  if (width <= 0.0) throw Error("eval_g: width must be > 0");
  if (coeffs.size() != centers.rows())
    throw DimensionError("eval_g: coefficient count does not match center count");
  if (x.size() != centers.cols())
    throw DimensionError("eval_g: point dimension does not match centers");
  double acc = 0.0;
  for (Eigen::Index k = 0; k < centers.rows(); ++k) {
    const double sq = (centers.row(k).transpose() - x).squaredNorm();
    acc += coeffs[k] * std::exp(-0.5 * sq / width);
  }
  return acc;
}

double anisotropic_distance(const Eigen::VectorXd& xi, const Eigen::VectorXd& xj,
                            const Eigen::VectorXd& m_diag) {
  if (xi.size() != xj.size() || xi.size() != m_diag.size())
    throw DimensionError("anisotropic_distance: dimension mismatch");
  if ((m_diag.array() <= 0.0).any())
    throw Error("anisotropic_distance: M diagonal must be positive");
  double acc = 0.0;
  for (Eigen::Index k = 0; k < xi.size(); ++k) {
    const double d = xi[k] - xj[k];
    acc += m_diag[k] * d * d;
  }
  return std::sqrt(acc);
}

namespace {

// Resolved, evaluation-ready view of (spec, hypers).
struct KernelParams {
  double sigma = 1.0;
  double length = 1.0;
  Eigen::VectorXd ard;
  Eigen::MatrixXd g_coeffs;  // num_g x n_centers
  Eigen::VectorXd g_widths;
  WarpNet net;
  bool has_net = false;
};

KernelParams resolve(const KernelSpec& spec, const HyperVector& hypers) {
  spec.validate();
  if (hypers.values.size() != hypers.layout.total() ||
      hypers.layout.total() != hyper_layout(spec).total())
    throw DimensionError("kernel hypers do not match the kernel's layout");
  KernelParams p;
  if (hypers.layout.has("sigma")) p.sigma = hypers.scalar("sigma");
  if (hypers.layout.has("length_scale")) p.length = hypers.scalar("length_scale");
  if (!std::isfinite(p.sigma) || !(p.length > 0.0))
    throw Error("kernel hypers: sigma must be finite and length scale positive");
  if (hypers.layout.has("ard_scales")) p.ard = hypers.segment_values("ard_scales");
  if (spec.uses_basis()) {
    const int n_centers = static_cast<int>(spec.basis_centers.rows());
    p.g_coeffs.resize(spec.num_g, n_centers);
    for (int a = 0; a < spec.num_g; ++a)
      p.g_coeffs.row(a) =
          hypers.segment_values("g" + std::to_string(a) + "_coeffs").transpose();
    p.g_widths = hypers.segment_values("g_widths");
  }
  if (spec.uses_net()) {
    p.net = WarpNet::unpack(spec.net_shape, hypers.segment_values("net_params"));
    p.has_net = true;
  }
  return p;
}

// Per-row g values: rows x num_g.
Eigen::MatrixXd g_table(const Eigen::MatrixXd& x, const KernelSpec& spec,
                        const KernelParams& p) {
  Eigen::MatrixXd g(x.rows(), spec.num_g);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const Eigen::VectorXd xi = x.row(i).transpose();
    for (int a = 0; a < spec.num_g; ++a)
      g(i, a) = eval_g(xi, p.g_coeffs.row(a).transpose(), spec.basis_centers,
                       p.g_widths[a]);
  }
  return g;
}

Eigen::MatrixXd warp_table(const Eigen::MatrixXd& x, const KernelParams& p) {
  Eigen::MatrixXd out(x.rows(), p.net.output_dim());
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    out.row(i) = p.net.forward(x.row(i).transpose()).transpose();
  return out;
}

// Fixed-order accumulation so k(x_i, x_j) and k(x_j, x_i) agree bit-exactly.
double squared_dist(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  double acc = 0.0;
  for (Eigen::Index k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    acc += d * d;
  }
  return acc;
}

double pair_distance(const Eigen::MatrixXd& a, Eigen::Index i,
                     const Eigen::MatrixXd& b, Eigen::Index j) {
  double acc = 0.0;
  for (Eigen::Index k = 0; k < a.cols(); ++k) {
    const double d = a(i, k) - b(j, k);
    acc += d * d;
  }
  return std::sqrt(acc);
}

}  // namespace

double eval_parametric_ns(const Eigen::VectorXd& xi, const Eigen::VectorXd& xj,
                          const KernelSpec& spec, const HyperVector& hypers) {
  const KernelParams p = resolve(spec, hypers);
  if (xi.size() != spec.dim || xj.size() != spec.dim)
    throw DimensionError("eval_parametric_ns: point dimension mismatch");
  double amp = 0.0;
  for (int a = 0; a < spec.num_g; ++a) {
    const Eigen::VectorXd c = p.g_coeffs.row(a).transpose();
    amp += eval_g(xi, c, spec.basis_centers, p.g_widths[a]) *
           eval_g(xj, c, spec.basis_centers, p.g_widths[a]);
  }
  const double d = std::sqrt(squared_dist(xi, xj));
  return amp * matern32(d, 1.0, p.length);
}

double eval_deep(const Eigen::VectorXd& xi, const Eigen::VectorXd& xj,
                 const HyperVector& hypers, const WarpNet& net) {
  const double d = std::sqrt(squared_dist(net.forward(xi), net.forward(xj)));
  return matern32(d, hypers.scalar("sigma"), hypers.scalar("length_scale"));
}

double eval_hybrid(const Eigen::VectorXd& xi, const Eigen::VectorXd& xj,
                   const KernelSpec& spec, const HyperVector& hypers,
                   const WarpNet& net) {
  const KernelParams p = resolve(spec, hypers);
  double amp = 0.0;
  for (int a = 0; a < spec.num_g; ++a) {
    const Eigen::VectorXd c = p.g_coeffs.row(a).transpose();
    amp += eval_g(xi, c, spec.basis_centers, p.g_widths[a]) *
           eval_g(xj, c, spec.basis_centers, p.g_widths[a]);
  }
  const double d = std::sqrt(squared_dist(net.forward(xi), net.forward(xj)));
  return amp * matern32(d, p.sigma, p.length);
}

double kernel_value(const KernelSpec& spec, const HyperVector& hypers,
                    const Eigen::VectorXd& xi, const Eigen::VectorXd& xj) {
  if (xi.size() != spec.dim || xj.size() != spec.dim)
    throw DimensionError("kernel_value: point dimension does not match spec");
  switch (spec.family) {
    case KernelFamily::Exponential:
    case KernelFamily::RBF:
    case KernelFamily::Matern32: {
      double acc = 0.0;
      for (Eigen::Index k = 0; k < xi.size(); ++k) {
        const double dk = xi[k] - xj[k];
        acc += dk * dk;
      }
      return eval_stationary(spec.family, std::sqrt(acc), hypers.scalar("sigma"),
                             hypers.scalar("length_scale"));
    }
    case KernelFamily::Matern32Ard: {
      const double d =
          anisotropic_distance(xi, xj, hypers.segment_values("ard_scales"));
      return matern32(d, hypers.scalar("sigma"), 1.0);
    }
    case KernelFamily::ParametricNS:
      return eval_parametric_ns(xi, xj, spec, hypers);
    case KernelFamily::Deep: {
      const WarpNet net =
          WarpNet::unpack(spec.net_shape, hypers.segment_values("net_params"));
      return eval_deep(xi, xj, hypers, net);
    }
    case KernelFamily::HybridParametricDeep: {
      const WarpNet net =
          WarpNet::unpack(spec.net_shape, hypers.segment_values("net_params"));
      return eval_hybrid(xi, xj, spec, hypers, net);
    }
  }
  throw Error("kernel_value: unknown kernel family");
}

Eigen::MatrixXd build_covariance(const Eigen::MatrixXd& x1,
                                 const Eigen::MatrixXd& x2,
                                 const KernelSpec& spec,
                                 const HyperVector& hypers) {
  if (x1.cols() != spec.dim || x2.cols() != spec.dim)
    throw DimensionError("build_covariance: point dimension " +
                         std::to_string(x1.cols()) + "/" + std::to_string(x2.cols()) +
                         " does not match kernel dim " + std::to_string(spec.dim));
  const KernelParams p = resolve(spec, hypers);
  const Eigen::Index rows = x1.rows(), cols = x2.rows();
  Eigen::MatrixXd k(rows, cols);

  switch (spec.family) {
    case KernelFamily::Exponential:
    case KernelFamily::RBF:
    case KernelFamily::Matern32: {
      for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j)
          k(i, j) = eval_stationary(spec.family, pair_distance(x1, i, x2, j),
                                    p.sigma, p.length);
      break;
    }
    case KernelFamily::Matern32Ard: {
      for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) {
          const double d = anisotropic_distance(x1.row(i).transpose(),
                                                x2.row(j).transpose(), p.ard);
          k(i, j) = matern32(d, p.sigma, 1.0);
        }
      break;
    }
    case KernelFamily::ParametricNS: {
      const Eigen::MatrixXd g1 = g_table(x1, spec, p);
      const Eigen::MatrixXd g2 = g_table(x2, spec, p);
      for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) {
          double amp = 0.0;
          for (int a = 0; a < spec.num_g; ++a) amp += g1(i, a) * g2(j, a);
          k(i, j) = amp * matern32(pair_distance(x1, i, x2, j), 1.0, p.length);
        }
      break;
    }
    case KernelFamily::Deep: {
      const Eigen::MatrixXd w1 = warp_table(x1, p);
      const Eigen::MatrixXd w2 = warp_table(x2, p);
      for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j)
          k(i, j) = matern32(pair_distance(w1, i, w2, j), p.sigma, p.length);
      break;
    }
    case KernelFamily::HybridParametricDeep: {
      const Eigen::MatrixXd g1 = g_table(x1, spec, p);
      const Eigen::MatrixXd g2 = g_table(x2, spec, p);
      const Eigen::MatrixXd w1 = warp_table(x1, p);
      const Eigen::MatrixXd w2 = warp_table(x2, p);
      for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) {
          double amp = 0.0;
          for (int a = 0; a < spec.num_g; ++a) amp += g1(i, a) * g2(j, a);
          k(i, j) = amp * matern32(pair_distance(w1, i, w2, j), p.sigma, p.length);
        }
      break;
    }
  }
  return k;
}

double total_nugget(const KernelSpec& spec, const HyperVector& hypers) {
  double v = spec.fixed_nugget;
  if (spec.trainable_nugget) v += hypers.scalar("nugget");
  return v;
}

}  // namespace nsgp
