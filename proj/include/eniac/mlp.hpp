#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "eniac/rng.hpp"

namespace eniac {

/// Fully connected ReLU network over a flat parameter vector.
///
/// Layer l stores W_l (out x in, column-major) followed by b_l. Inputs and
/// outputs are batched column-wise: x is (input_dim x batch).
class Mlp {
 public:
  /// Activations of one forward pass, kept for the backward pass.
  struct Workspace {
    std::vector<Eigen::MatrixXd> activations;  // a_0 = x, ..., a_L = output
  };

  explicit Mlp(std::vector<std::size_t> layer_sizes);

  const std::vector<std::size_t>& layer_sizes() const { return sizes_; }
  std::size_t input_dim() const { return sizes_.front(); }
  std::size_t output_dim() const { return sizes_.back(); }
  std::size_t num_params() const { return num_params_; }

  /// He-uniform weights, biases uniform in +-1/sqrt(fan_in). With
  /// `zero_output_layer` the last layer (weights and bias) is zero and the network
  /// starts as the zero function.
  Eigen::VectorXd init_params(Rng& rng, bool zero_output_layer = false) const;

  Eigen::MatrixXd forward(const Eigen::VectorXd& theta, const Eigen::MatrixXd& x,
                          Workspace* ws = nullptr) const;

  /// grad += d(sum over batch of <d_out, output>)/d theta.
  void backward(const Eigen::VectorXd& theta, const Workspace& ws, const Eigen::MatrixXd& d_out,
                Eigen::VectorXd& grad) const;

 private:
  std::vector<std::size_t> sizes_;
  std::vector<std::size_t> offsets_;  // start of W_l; b_l follows W_l
  std::size_t num_params_ = 0;
};

}  // namespace eniac
