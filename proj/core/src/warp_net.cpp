#include "nsgp/warp_net.hpp"

#include "nsgp/errors.hpp"

namespace nsgp {

WarpNet::WarpNet(std::vector<int> layer_widths) : widths_(std::move(layer_widths)) {
  if (widths_.size() < 2)
    throw DimensionError("WarpNet: need at least an input and an output layer");
  for (int w : widths_)
    if (w < 1) throw DimensionError("WarpNet: layer widths must be >= 1");
  const std::size_t n_layers = widths_.size() - 1;
  weights_.reserve(n_layers);
  biases_.reserve(n_layers);
  for (std::size_t l = 0; l < n_layers; ++l) {
    weights_.emplace_back(Eigen::MatrixXd::Zero(widths_[l + 1], widths_[l]));
    biases_.emplace_back(Eigen::VectorXd::Zero(widths_[l + 1]));
  }
}

std::int64_t WarpNet::parameter_count(const std::vector<int>& layer_widths) {
  if (layer_widths.size() < 2)
    throw DimensionError("WarpNet: need at least an input and an output layer");
  std::int64_t count = 0;
  for (std::size_t l = 0; l + 1 < layer_widths.size(); ++l) {
    const std::int64_t fan_in = layer_widths[l];
    const std::int64_t fan_out = layer_widths[l + 1];
    count += fan_in * fan_out + fan_out;
  }
  return count;
}

WarpNet WarpNet::unpack(const std::vector<int>& layer_widths,
                        const Eigen::VectorXd& flat) {
  if (flat.size() != parameter_count(layer_widths))
    throw DimensionError("WarpNet::unpack: flat vector length " +
                         std::to_string(flat.size()) + " does not match parameter count " +
                         std::to_string(parameter_count(layer_widths)));
  WarpNet net(layer_widths);
  Eigen::Index pos = 0;
  for (std::size_t l = 0; l < net.weights_.size(); ++l) {
    Eigen::MatrixXd& w = net.weights_[l];
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = flat[pos++];
    Eigen::VectorXd& b = net.biases_[l];
    for (Eigen::Index r = 0; r < b.size(); ++r) b[r] = flat[pos++];
  }
  return net;
}

Eigen::VectorXd WarpNet::pack() const {
  Eigen::VectorXd flat(parameter_count(widths_));
  Eigen::Index pos = 0;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    const Eigen::MatrixXd& w = weights_[l];
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c) flat[pos++] = w(r, c);
    const Eigen::VectorXd& b = biases_[l];
    for (Eigen::Index r = 0; r < b.size(); ++r) flat[pos++] = b[r];
  }
  return flat;
}

Eigen::VectorXd WarpNet::forward(const Eigen::VectorXd& x) const {
  if (x.size() != input_dim())
    throw DimensionError("WarpNet::forward: input has dimension " +
                         std::to_string(x.size()) + ", expected " +
                         std::to_string(input_dim()));
  Eigen::VectorXd h = x;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    h = weights_[l] * h + biases_[l];
    if (l + 1 < weights_.size()) h = h.cwiseMax(0.0);  // ReLU on hidden layers
  }
  return h;
}

}  // namespace nsgp
