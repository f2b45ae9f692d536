#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "eniac/function_class.hpp"
#include "eniac/mdp.hpp"
#include "eniac/mlp.hpp"

namespace eniac {

/// Clipped-ratio policy optimization settings for experiment mode.
struct PpoConfig {
  double learning_rate = 5e-4;
  double gae_lambda = 0.95;
  double gradient_clip = 5.0;
  double entropy_coef = 0.01;
  double ratio_clip = 0.2;
  std::size_t minibatch = 160;
  std::size_t epochs = 5;
  double epsilon_greedy = 0.05;
  /// Transitions gathered per update.
  std::size_t rollout_steps = 2000;
  double value_coef = 0.5;
  std::vector<std::size_t> hidden = {64, 64};

  void validate() const;
};

class Adam {
 public:
  explicit Adam(std::size_t n, double learning_rate, double beta1 = 0.9, double beta2 = 0.999,
                double eps = 1e-8);
  void step(Eigen::VectorXd& theta, const Eigen::VectorXd& grad);

 private:
  Eigen::VectorXd m_, v_;
  double lr_, b1_, b2_, eps_;
  std::size_t t_ = 0;
};

/// Softmax policy head mixed with epsilon-uniform, stored by value.
class NetworkPolicy final : public Policy {
 public:
  NetworkPolicy(std::shared_ptr<const MlpClass> net, Params theta, double epsilon);
  std::size_t num_actions() const override { return net_->num_actions(); }
  void action_probabilities(const State& s, std::span<double> out) const override;

 private:
  std::shared_ptr<const MlpClass> net_;
  Params theta_;
  double epsilon_;
};

struct Transition {
  State state;
  std::size_t action = 0;
  double reward = 0.0;
  /// Behaviour probability of `action` when it was taken.
  double behaviour_prob = 1.0;
  /// Last transition of its segment (episode end or rollout cut).
  bool segment_end = false;
  /// The segment ended because the episode ended; no bootstrap.
  bool terminal = false;
  State next;
};

struct PpoStats {
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double clip_fraction = 0.0;
};

class PpoAgent {
 public:
  PpoAgent(std::shared_ptr<const MlpClass> policy_arch, std::shared_ptr<const MlpClass> value_arch,
           PpoConfig config, Rng& rng);

  std::size_t num_actions() const { return policy_arch_->num_actions(); }
  void probabilities(const State& s, std::span<double> out) const;
  double value(const State& s) const;
  std::shared_ptr<const NetworkPolicy> snapshot() const;

  /// GAE advantages, then `epochs` passes of clipped-surrogate minibatch steps.
  PpoStats update(const std::vector<Transition>& batch, double gamma, Rng& rng);

  const PpoConfig& config() const { return config_; }

 private:
  std::shared_ptr<const MlpClass> policy_arch_, value_arch_;
  PpoConfig config_;
  Params policy_theta_, value_theta_;
  Adam policy_opt_, value_opt_;
};

/// Generalized advantage estimates and value targets for an ordered batch.
void compute_gae(const std::vector<Transition>& batch, std::span<const double> values,
                 std::span<const double> next_values, double gamma, double lambda,
                 std::vector<double>& advantages, std::vector<double>& returns);

}  // namespace eniac
