#include "eniac/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace eniac {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

void PpoConfig::validate() const {
  if (!(learning_rate > 0.0 && gradient_clip > 0.0 && ratio_clip > 0.0))
    throw std::invalid_argument("PpoConfig: learning rate, clip and ratio clip must be positive");
  if (!(gae_lambda >= 0.0 && gae_lambda <= 1.0))
    throw std::invalid_argument("PpoConfig: GAE lambda outside [0, 1]");
  if (!(epsilon_greedy >= 0.0 && epsilon_greedy < 1.0))
    throw std::invalid_argument("PpoConfig: epsilon-greedy outside [0, 1)");
  if (minibatch == 0 || epochs == 0 || rollout_steps == 0)
    throw std::invalid_argument("PpoConfig: minibatch, epochs and rollout steps must be positive");
  if (entropy_coef < 0.0 || value_coef < 0.0)
    throw std::invalid_argument("PpoConfig: loss weights must be nonnegative");
}

Adam::Adam(std::size_t n, double learning_rate, double beta1, double beta2, double eps)
    : m_(VectorXd::Zero(static_cast<Index>(n))),
      v_(VectorXd::Zero(static_cast<Index>(n))),
      lr_(learning_rate),
      b1_(beta1),
      b2_(beta2),
      eps_(eps) {}

void Adam::step(VectorXd& theta, const VectorXd& grad) {
  ++t_;
  m_ = b1_ * m_ + (1.0 - b1_) * grad;
  v_ = b2_ * v_ + (1.0 - b2_) * grad.cwiseAbs2();
  const double c1 = 1.0 - std::pow(b1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(b2_, static_cast<double>(t_));
  theta.array() -= lr_ * (m_.array() / c1) / ((v_.array() / c2).sqrt() + eps_);
}

namespace {

void mix_softmax(std::span<const double> logits, double epsilon, std::span<double> out) {
  softmax(logits, out);
  const double floor = epsilon / static_cast<double>(out.size());
  for (double& p : out) p = (1.0 - epsilon) * p + floor;
}

void clip_norm(VectorXd& g, double clip) {
  const double n = g.norm();
  if (n > clip) g *= clip / n;
}

}  // namespace

NetworkPolicy::NetworkPolicy(std::shared_ptr<const MlpClass> net, Params theta, double epsilon)
    : net_(std::move(net)), theta_(std::move(theta)), epsilon_(epsilon) {}

void NetworkPolicy::action_probabilities(const State& s, std::span<double> out) const {
  const MatrixXd y = net_->network().forward(theta_, net_->encode(s));
  std::vector<double> logits(y.data(), y.data() + y.rows());
  mix_softmax(logits, epsilon_, out);
}

PpoAgent::PpoAgent(std::shared_ptr<const MlpClass> policy_arch,
                   std::shared_ptr<const MlpClass> value_arch, PpoConfig config, Rng& rng)
    : policy_arch_(std::move(policy_arch)),
      value_arch_(std::move(value_arch)),
      config_(std::move(config)),
      policy_theta_(policy_arch_->network().init_params(rng, true)),
      value_theta_(value_arch_->network().init_params(rng, true)),
      policy_opt_(policy_arch_->num_params(), config_.learning_rate),
      value_opt_(value_arch_->num_params(), config_.learning_rate) {
  config_.validate();
  if (value_arch_->num_actions() != 1)
    throw std::invalid_argument("PpoAgent: value network needs a single output");
}

void PpoAgent::probabilities(const State& s, std::span<double> out) const {
  const MatrixXd y = policy_arch_->network().forward(policy_theta_, policy_arch_->encode(s));
  std::vector<double> logits(y.data(), y.data() + y.rows());
  mix_softmax(logits, config_.epsilon_greedy, out);
}

double PpoAgent::value(const State& s) const {
  return value_arch_->network().forward(value_theta_, value_arch_->encode(s))(0, 0);
}

std::shared_ptr<const NetworkPolicy> PpoAgent::snapshot() const {
  return std::make_shared<NetworkPolicy>(policy_arch_, policy_theta_, config_.epsilon_greedy);
}

void compute_gae(const std::vector<Transition>& batch, std::span<const double> values,
                 std::span<const double> next_values, double gamma, double lambda,
                 std::vector<double>& advantages, std::vector<double>& returns) {
  const std::size_t n = batch.size();
  advantages.assign(n, 0.0);
  returns.assign(n, 0.0);
  double running = 0.0;
  for (std::size_t i = n; i-- > 0;) {
    const Transition& tr = batch[i];
    const double bootstrap = tr.terminal ? 0.0 : next_values[i];
    const double delta = tr.reward + gamma * bootstrap - values[i];
    running = delta + (tr.segment_end ? 0.0 : gamma * lambda * running);
    advantages[i] = running;
    returns[i] = running + values[i];
  }
}

PpoStats PpoAgent::update(const std::vector<Transition>& batch, double gamma, Rng& rng) {
  if (batch.empty()) throw std::invalid_argument("PpoAgent::update: empty batch");
  const std::size_t n = batch.size(), na = num_actions();
  const auto& pnet = policy_arch_->network();
  const auto& vnet = value_arch_->network();

  std::vector<State> states, nexts;
  states.reserve(n);
  nexts.reserve(n);
  for (const auto& tr : batch) {
    states.push_back(tr.state);
    nexts.push_back(tr.next);
  }
  const MatrixXd x = policy_arch_->encode_batch(states);
  const MatrixXd xv = value_arch_->encode_batch(states);
  const MatrixXd xn = value_arch_->encode_batch(nexts);
  const MatrixXd v = vnet.forward(value_theta_, xv);
  const MatrixXd vn = vnet.forward(value_theta_, xn);
  std::vector<double> values(v.data(), v.data() + n), next_values(vn.data(), vn.data() + n);
  std::vector<double> adv, ret;
  compute_gae(batch, values, next_values, gamma, config_.gae_lambda, adv, ret);

  const double mean = std::accumulate(adv.begin(), adv.end(), 0.0) / static_cast<double>(n);
  double var = 0.0;
  for (double a : adv) var += (a - mean) * (a - mean);
  const double sd = std::sqrt(var / static_cast<double>(n)) + 1e-8;
  for (double& a : adv) a = (a - mean) / sd;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  PpoStats stats;
  std::size_t updates = 0, clipped = 0, counted = 0;
  const double eps = config_.epsilon_greedy;
  std::vector<double> logits(na), p(na);

  for (std::size_t epoch = 0; epoch < config_.epochs; ++epoch) {
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.index(i)]);
    for (std::size_t start = 0; start < n; start += config_.minibatch) {
      const std::size_t end = std::min(n, start + config_.minibatch);
      const auto mb = static_cast<Index>(end - start);
      MatrixXd xb(x.rows(), mb), xvb(xv.rows(), mb);
      for (Index j = 0; j < mb; ++j) {
        xb.col(j) = x.col(static_cast<Index>(order[start + static_cast<std::size_t>(j)]));
        xvb.col(j) = xv.col(static_cast<Index>(order[start + static_cast<std::size_t>(j)]));
      }

      Mlp::Workspace ws;
      const MatrixXd z = pnet.forward(policy_theta_, xb, &ws);
      MatrixXd dz = MatrixXd::Zero(z.rows(), z.cols());
      double ploss = 0.0, ent = 0.0;
      for (Index j = 0; j < mb; ++j) {
        const std::size_t k = order[start + static_cast<std::size_t>(j)];
        const Transition& tr = batch[k];
        for (std::size_t a = 0; a < na; ++a) logits[a] = z(static_cast<Index>(a), j);
        softmax(logits, p);
        const std::size_t act = tr.action;
        const double pi_new = (1.0 - eps) * p[act] + eps / static_cast<double>(na);
        const double ratio = pi_new / tr.behaviour_prob;
        const double A = adv[k];
        const double lo = 1.0 - config_.ratio_clip, hi = 1.0 + config_.ratio_clip;
        const double surr = std::min(ratio * A, std::clamp(ratio, lo, hi) * A);
        ploss -= surr;
        const bool active = !((A >= 0.0 && ratio > hi) || (A < 0.0 && ratio < lo));
        if (!active) ++clipped;
        ++counted;
        double h = 0.0;
        for (double q : p)
          if (q > 0.0) h -= q * std::log(q);
        ent += h;
        for (std::size_t a = 0; a < na; ++a) {
          double g = 0.0;
          if (active) {
            const double dp = p[act] * ((a == act ? 1.0 : 0.0) - p[a]);
            g -= A * (1.0 - eps) * dp / tr.behaviour_prob;
          }
          if (p[a] > 0.0) g += config_.entropy_coef * p[a] * (std::log(p[a]) + h);
          dz(static_cast<Index>(a), j) = g / static_cast<double>(mb);
        }
      }
      VectorXd grad = VectorXd::Zero(policy_theta_.size());
      pnet.backward(policy_theta_, ws, dz, grad);
      clip_norm(grad, config_.gradient_clip);
      policy_opt_.step(policy_theta_, grad);

      Mlp::Workspace wv;
      const MatrixXd vb = vnet.forward(value_theta_, xvb, &wv);
      MatrixXd dv(1, mb);
      double vloss = 0.0;
      for (Index j = 0; j < mb; ++j) {
        const double r = vb(0, j) - ret[order[start + static_cast<std::size_t>(j)]];
        vloss += r * r;
        dv(0, j) = config_.value_coef * 2.0 * r / static_cast<double>(mb);
      }
      VectorXd vgrad = VectorXd::Zero(value_theta_.size());
      vnet.backward(value_theta_, wv, dv, vgrad);
      clip_norm(vgrad, config_.gradient_clip);
      value_opt_.step(value_theta_, vgrad);

      stats.policy_loss += ploss / static_cast<double>(mb);
      stats.value_loss += vloss / static_cast<double>(mb);
      stats.entropy += ent / static_cast<double>(mb);
      ++updates;
    }
  }
  if (updates) {
    stats.policy_loss /= static_cast<double>(updates);
    stats.value_loss /= static_cast<double>(updates);
    stats.entropy /= static_cast<double>(updates);
  }
  stats.clip_fraction = counted ? static_cast<double>(clipped) / static_cast<double>(counted) : 0.0;
  if (!std::isfinite(stats.policy_loss) || !std::isfinite(stats.value_loss))
    throw std::runtime_error("PPO update produced a non-finite loss; lower the learning rate");
  return stats;
}

}  // namespace eniac
