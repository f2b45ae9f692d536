#include "eniac/neural_width.hpp"

#include <cmath>
#include <iostream>
#include <ostream>
#include <stdexcept>
#include <string>

namespace eniac {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

void WidthTrainConfig::validate() const {
  if (!(lambda > 0.0 && lambda1 > 0.0 && learning_rate > 0.0 && gradient_clip > 0.0))
    throw std::invalid_argument("WidthTrainConfig: weights, learning rate and clip must be positive");
  if (query_set_size == 0 || buffer_batch == 0 || query_batch == 0 || inner_iters == 0)
    throw std::invalid_argument("WidthTrainConfig: batch sizes and inner iterations must be positive");
}

WidthNetPair WidthNetPair::initialize(std::shared_ptr<const MlpClass> arch, Rng& rng) {
  if (!arch) throw std::invalid_argument("WidthNetPair: null architecture");
  Params f = arch->network().init_params(rng, false);
  Params copy = f;
  return WidthNetPair(std::move(arch), std::move(f), std::move(copy));
}

WidthNetPair::WidthNetPair(std::shared_ptr<const MlpClass> arch, Params f, Params f_prime)
    : arch_(std::move(arch)), f_(std::move(f)), f_prime_(std::move(f_prime)) {
  if (!arch_) throw std::invalid_argument("WidthNetPair: null architecture");
  const auto n = static_cast<Index>(arch_->num_params());
  if (f_.size() != n || f_prime_.size() != n)
    throw std::invalid_argument("WidthNetPair: parameter size mismatch");
}

void WidthNetPair::set_f(Params f) {
  if (f.size() != f_.size()) throw std::invalid_argument("WidthNetPair: parameter size mismatch");
  f_ = std::move(f);
}

double WidthNetPair::difference(const State& s, std::size_t a) const {
  const VectorXd x = arch_->encode(s);
  const auto& net = arch_->network();
  const auto row = static_cast<Index>(a);
  return net.forward(f_, x)(row, 0) - net.forward(f_prime_, x)(row, 0);
}

double WidthNetPair::width(const State& s, std::size_t a) const {
  return std::abs(difference(s, a));
}

VectorXd WidthNetPair::differences(std::span<const StateAction> batch) const {
  std::vector<State> states;
  states.reserve(batch.size());
  for (const auto& z : batch) states.push_back(z.state);
  const MatrixXd x = arch_->encode_batch(states);
  const auto& net = arch_->network();
  const MatrixXd y = net.forward(f_, x) - net.forward(f_prime_, x);
  VectorXd d(static_cast<Index>(batch.size()));
  for (std::size_t i = 0; i < batch.size(); ++i)
    d[static_cast<Index>(i)] = y(static_cast<Index>(batch[i].action), static_cast<Index>(i));
  return d;
}

WidthFn WidthNetPair::as_function() const {
  auto self = std::make_shared<const WidthNetPair>(*this);
  return [self](const State& s, std::size_t a) { return self->width(s, a); };
}

std::uint64_t params_hash(const Params& p) {
  std::uint64_t h = 1469598103934665603ULL;
  const auto* bytes = reinterpret_cast<const unsigned char*>(p.data());
  for (std::size_t i = 0; i < static_cast<std::size_t>(p.size()) * sizeof(double); ++i) {
    h ^= bytes[i];
    h *= 1099511628211ULL;
  }
  return h;
}

WidthLoss width_loss(const WidthNetPair& pair, std::span<const StateAction> query_batch,
                     std::span<const StateAction> buffer_batch, double lambda, double lambda1) {
  if (query_batch.empty() || buffer_batch.empty())
    throw std::invalid_argument("width_loss: empty minibatch");
  const VectorXd dq = pair.differences(query_batch);
  const VectorXd dj = pair.differences(buffer_batch);
  WidthLoss loss;
  loss.stretch = lambda * dq.squaredNorm() / static_cast<double>(dq.size());
  loss.tie = -dj.squaredNorm() / static_cast<double>(dj.size());
  loss.degeneracy = -lambda1 * dq.mean();
  return loss;
}

namespace {

// Accumulates d/df of sum_i w_i(d_i) where d_out(a_i, i) = weight for sample i.
void accumulate(const WidthNetPair& pair, std::span<const StateAction> batch,
                const std::function<double(double)>& weight, VectorXd& grad, double* mean_width) {
  std::vector<State> states;
  states.reserve(batch.size());
  for (const auto& z : batch) states.push_back(z.state);
  const MatrixXd x = pair.architecture().encode_batch(states);
  const auto& net = pair.architecture().network();
  Mlp::Workspace ws;
  const MatrixXd y = net.forward(pair.f(), x, &ws);
  const MatrixXd y0 = net.forward(pair.f_prime(), x);
  MatrixXd d_out = MatrixXd::Zero(y.rows(), y.cols());
  double total = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto r = static_cast<Index>(batch[i].action), c = static_cast<Index>(i);
    const double d = y(r, c) - y0(r, c);
    total += std::abs(d);
    d_out(r, c) = weight(d);
  }
  net.backward(pair.f(), ws, d_out, grad);
  if (mean_width) *mean_width = total / static_cast<double>(batch.size());
}

}  // namespace

VectorXd width_loss_gradient(const WidthNetPair& pair, std::span<const StateAction> query_batch,
                             std::span<const StateAction> buffer_batch, double lambda,
                             double lambda1) {
  if (query_batch.empty() || buffer_batch.empty())
    throw std::invalid_argument("width_loss: empty minibatch");
  VectorXd grad = VectorXd::Zero(pair.f().size());
  const double nq = static_cast<double>(query_batch.size());
  const double nj = static_cast<double>(buffer_batch.size());
  accumulate(pair, query_batch, [&](double d) { return (2.0 * lambda * d - lambda1) / nq; }, grad,
             nullptr);
  accumulate(pair, buffer_batch, [&](double d) { return -2.0 * d / nj; }, grad, nullptr);
  return grad;
}

void write_width_log(std::ostream& out, const std::vector<WidthLogRow>& rows) {
  out << "iter,loss,mean_buffer_width,mean_query_width\n";
  const auto old = out.precision(10);
  for (const auto& r : rows)
    out << r.iter << ',' << r.loss << ',' << r.mean_buffer_width << ',' << r.mean_query_width
        << '\n';
  out.precision(old);
}

TrainedWidth train_width(std::shared_ptr<const MlpClass> arch, const Dataset& buffer,
                         const Dataset& query_set, const WidthTrainConfig& config, Rng& rng) {
  config.validate();
  if (buffer.size() < config.buffer_batch)
    throw std::invalid_argument("train_width: buffer smaller than the buffer minibatch (" +
                                std::to_string(buffer.size()) + " < " +
                                std::to_string(config.buffer_batch) + ")");
  if (query_set.empty()) throw std::invalid_argument("train_width: empty query set");

  TrainedWidth out{WidthNetPair::initialize(std::move(arch), rng), query_set, {}, 0.0};
  WidthNetPair& pair = out.pair;

  std::vector<StateAction> dq(config.query_batch), dj(config.buffer_batch);
  for (std::size_t iter = 0; iter < config.outer_iters; ++iter) {
    for (auto& z : dq) z = query_set[rng.index(query_set.size())];
    WidthLoss loss;
    for (std::size_t j = 0; j < config.inner_iters; ++j) {
      for (auto& z : dj) z = buffer[rng.index(buffer.size())];
      loss = width_loss(pair, dq, dj, config.lambda, config.lambda1);
      if (!std::isfinite(loss.total()))
        throw std::runtime_error("train_width: non-finite loss at outer iteration " +
                                 std::to_string(iter) +
                                 "; lower learning_rate or gradient_clip");
      VectorXd step = width_loss_gradient(pair, dq, dj, config.lambda, config.lambda1);
      const double norm = step.norm();
      if (norm > config.gradient_clip) step *= config.gradient_clip / norm;
      step *= config.learning_rate;
      out.max_update_norm = std::max(out.max_update_norm, step.norm());
      pair.set_f(pair.f() + step);
    }
    WidthLogRow row;
    row.iter = iter;
    row.loss = loss.total();
    row.mean_query_width = pair.differences(dq).cwiseAbs().mean();
    row.mean_buffer_width = pair.differences(dj).cwiseAbs().mean();
    out.log.push_back(row);
  }
  return out;
}

TrainedWidth train_width(std::shared_ptr<const MlpClass> arch, const Dataset& buffer,
                         const QuerySampler& sampler, const WidthTrainConfig& config, Rng& rng) {
  config.validate();
  Dataset query_set;
  for (std::size_t i = 0; i < config.query_set_size; ++i) {
    StateAction z = sampler(rng);
    query_set.append(std::move(z.state), z.action);
  }
  return train_width(std::move(arch), buffer, query_set, config, rng);
}

Bonus normalized_bonus(const WidthFn& width, const Dataset& query_set, std::size_t num_actions) {
  if (query_set.empty()) throw std::invalid_argument("normalized_bonus: empty query set");
  double top = 0.0;
  for (const auto& z : query_set.items()) top = std::max(top, width(z.state, z.action));
  if (!(top > 0.0)) {
    std::cerr << "warning: width is zero on the whole query set; using the zero bonus\n";
    return Bonus::zero(num_actions);
  }
  const double scale = 0.5 / top;
  // Off the query set the value may exceed 0.5; no threshold is applied.
  return Bonus([width, scale](const State& s, std::size_t a) { return scale * width(s, a); },
               num_actions, 0.5);
}

}  // namespace eniac
