#include "eniac/mlp.hpp"

#include <cmath>
#include <stdexcept>

namespace eniac {

using Eigen::Index;
using Eigen::Map;
using Eigen::MatrixXd;
using Eigen::VectorXd;

Mlp::Mlp(std::vector<std::size_t> layer_sizes) : sizes_(std::move(layer_sizes)) {
  if (sizes_.size() < 2) throw std::invalid_argument("Mlp: need input and output sizes");
  for (std::size_t n : sizes_)
    if (n == 0) throw std::invalid_argument("Mlp: zero-width layer");
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    offsets_.push_back(num_params_);
    num_params_ += sizes_[l + 1] * sizes_[l] + sizes_[l + 1];
  }
}

VectorXd Mlp::init_params(Rng& rng, bool zero_output_layer) const {
  VectorXd theta = VectorXd::Zero(static_cast<Index>(num_params_));
  const std::size_t layers = offsets_.size();
  for (std::size_t l = 0; l < layers; ++l) {
    if (zero_output_layer && l + 1 == layers) break;
    const double bound = std::sqrt(6.0 / static_cast<double>(sizes_[l]));
    const std::size_t count = sizes_[l + 1] * sizes_[l];
    for (std::size_t i = 0; i < count; ++i)
      theta[static_cast<Index>(offsets_[l] + i)] = rng.uniform(-bound, bound);
    // Nonzero biases: with all-zero biases the net is positively homogeneous
    // at the origin.
    const double bias_bound = 1.0 / std::sqrt(static_cast<double>(sizes_[l]));
    for (std::size_t i = 0; i < sizes_[l + 1]; ++i)
      theta[static_cast<Index>(offsets_[l] + count + i)] = rng.uniform(-bias_bound, bias_bound);
  }
  return theta;
}

MatrixXd Mlp::forward(const VectorXd& theta, const MatrixXd& x, Workspace* ws) const {
  if (theta.size() != static_cast<Index>(num_params_))
    throw std::invalid_argument("Mlp::forward: parameter vector has wrong size");
  if (x.rows() != static_cast<Index>(input_dim()))
    throw std::invalid_argument("Mlp::forward: input has wrong dimension");
  if (ws) {
    ws->activations.resize(sizes_.size());
    ws->activations[0] = x;
  }
  MatrixXd a = x;
  const std::size_t layers = offsets_.size();
  for (std::size_t l = 0; l < layers; ++l) {
    const auto rows = static_cast<Index>(sizes_[l + 1]);
    const auto cols = static_cast<Index>(sizes_[l]);
    Map<const MatrixXd> w(theta.data() + offsets_[l], rows, cols);
    Map<const VectorXd> b(theta.data() + offsets_[l] + rows * cols, rows);
    MatrixXd z = w * a;
    z.colwise() += b;
    if (l + 1 < layers) z = z.cwiseMax(0.0);
    a = std::move(z);
    if (ws) ws->activations[l + 1] = a;
  }
  return a;
}

void Mlp::backward(const VectorXd& theta, const Workspace& ws, const MatrixXd& d_out,
                   VectorXd& grad) const {
  if (grad.size() != static_cast<Index>(num_params_))
    grad = VectorXd::Zero(static_cast<Index>(num_params_));
  MatrixXd delta = d_out;
  for (std::size_t l = offsets_.size(); l-- > 0;) {
    const auto rows = static_cast<Index>(sizes_[l + 1]);
    const auto cols = static_cast<Index>(sizes_[l]);
    Map<const MatrixXd> w(theta.data() + offsets_[l], rows, cols);
    Map<MatrixXd> gw(grad.data() + offsets_[l], rows, cols);
    Map<VectorXd> gb(grad.data() + offsets_[l] + rows * cols, rows);
    const MatrixXd& input = ws.activations[l];
    gw.noalias() += delta * input.transpose();
    gb += delta.rowwise().sum();
    if (l == 0) break;
    MatrixXd back = w.transpose() * delta;
    // ReLU derivative from the stored post-activation of the previous layer.
    delta = back.cwiseProduct((input.array() > 0.0).cast<double>().matrix());
  }
}

}  // namespace eniac
