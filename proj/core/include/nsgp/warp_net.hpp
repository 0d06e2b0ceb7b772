#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace nsgp {

/// Small fully connected network used as the input-warping map of the deep
/// kernel. Hidden layers use ReLU, the output layer is linear. Parameters are
/// not trained by backprop; they are packed into a flat vector and handed to
/// the derivative-free optimizers like any other hyperparameter.
class WarpNet {
public:
  WarpNet() = default;

  /// Zero-initialized network. layer_widths includes input and output widths,
  /// e.g. {1, 5, 5, 1}.
  explicit WarpNet(std::vector<int> layer_widths);

  static std::int64_t parameter_count(const std::vector<int>& layer_widths);

  /// Inverse of pack(). Layout is layer-major: weights row-major, then biases.
  static WarpNet unpack(const std::vector<int>& layer_widths,
                        const Eigen::VectorXd& flat);

  Eigen::VectorXd pack() const;

  Eigen::VectorXd forward(const Eigen::VectorXd& x) const;

  const std::vector<int>& layer_widths() const noexcept { return widths_; }
  int input_dim() const noexcept { return widths_.empty() ? 0 : widths_.front(); }
  int output_dim() const noexcept { return widths_.empty() ? 0 : widths_.back(); }

  const std::vector<Eigen::MatrixXd>& weights() const noexcept { return weights_; }
  const std::vector<Eigen::VectorXd>& biases() const noexcept { return biases_; }
  Eigen::MatrixXd& weight(std::size_t layer) { return weights_.at(layer); }
  Eigen::VectorXd& bias(std::size_t layer) { return biases_.at(layer); }

private:
  std::vector<int> widths_;
  std::vector<Eigen::MatrixXd> weights_;  // fan_out x fan_in per layer
  std::vector<Eigen::VectorXd> biases_;
};

}  // namespace nsgp
