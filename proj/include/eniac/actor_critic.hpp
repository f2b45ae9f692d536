#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "eniac/estimators.hpp"
#include "eniac/function_class.hpp"
#include "eniac/mdp.hpp"
#include "eniac/width.hpp"

namespace eniac {

enum class UpdateAlgorithm { spi, npg };
enum class UpdateMode { sample, compute };

struct UpdateVariant {
  UpdateAlgorithm algorithm = UpdateAlgorithm::spi;
  UpdateMode mode = UpdateMode::sample;
  /// Uniform-mix weight, read only in compute mode.
  double alpha = 0.1;

  void validate() const;
  /// "spi-sample", "spi-compute", "npg-sample" or "npg-compute".
  std::string name() const;
  static UpdateVariant parse(const std::string& name, double alpha = 0.1);
};

/// How the bonus enters the reward: r + b (theory) or max(r, b) (experiments).
enum class Combiner { sum, max };

std::string combiner_name(Combiner c);
Combiner parse_combiner(const std::string& name);

RewardFn combined_reward(const Mdp& mdp, const Bonus& bonus, Combiner combiner);
/// combined(s, a) - r(s, a); equals b(s, a) under the sum combiner.
double effective_bonus(const Mdp& mdp, const Bonus& bonus, Combiner combiner, const State& s,
                       std::size_t a);

/// pi_0(.|s) written into `out`. Sample mode: uniform where s is fully known,
/// otherwise uniform over the unknown actions. Compute mode: uniform.
void initial_probabilities(const UpdateVariant& variant, const Bonus& known, const State& s,
                           std::span<double> out);

PolicyPtr init_policy(const UpdateVariant& variant, const Bonus& known, std::size_t num_actions);

/// Multiplicative-weights iterate pi_t built from the critics of this epoch.
///
/// Sample mode: pi_t(.|s) ∝ pi_0(.|s) exp(sum_i eta_i f_i(s, .)) at fully known
/// s and pi_0(.|s) elsewhere. Compute mode: pi'_t ∝ exp(sum_i eta_i f_i) and the
/// output is (1 - alpha) pi'_t + alpha Unif. Linear classes keep the running
/// sum of coefficients; other classes keep the list of critics.
class SpiPolicy final : public Policy {
 public:
  SpiPolicy(FunctionClassPtr cls, UpdateVariant variant, Bonus known);

  std::size_t num_actions() const override { return cls_->num_actions(); }
  void action_probabilities(const State& s, std::span<double> out) const override;

  std::shared_ptr<const SpiPolicy> step(const Params& critic, double eta) const;
  std::size_t iterations() const { return count_; }
  const UpdateVariant& variant() const { return variant_; }

 private:
  struct Term {
    Params params;
    double eta;
    std::shared_ptr<const Term> prev;
  };

  void logits(const State& s, std::span<double> out) const;

  FunctionClassPtr cls_;
  UpdateVariant variant_;
  Bonus known_;
  std::shared_ptr<const Term> terms_;
  Params summed_;  // linear classes only
  std::size_t count_ = 0;
};

/// Softmax-parameterized iterate with theta_t. Sample mode uses softmax(f_theta)
/// at fully known states and pi_0 elsewhere; compute mode mixes
/// softmax(f_theta) with alpha-uniform.
class NpgPolicy final : public Policy {
 public:
  /// theta defaults to the class's uniform member.
  NpgPolicy(DifferentiableClassPtr cls, UpdateVariant variant, Bonus known,
            std::optional<Params> theta = std::nullopt);

  std::size_t num_actions() const override { return cls_->num_actions(); }
  void action_probabilities(const State& s, std::span<double> out) const override;

  std::shared_ptr<const NpgPolicy> step(const Eigen::VectorXd& u, double eta) const;
  const Params& theta() const { return theta_; }
  const DifferentiableClass& function_class() const { return *cls_; }
  DifferentiableClassPtr function_class_ptr() const { return cls_; }

 private:
  DifferentiableClassPtr cls_;
  UpdateVariant variant_;
  Bonus known_;
  Params theta_;
};

std::shared_ptr<const SpiPolicy> spi_actor_step(const SpiPolicy& policy, const Params& critic,
                                                double eta);
/// Rejects u whose dimension differs from theta's.
std::shared_ptr<const NpgPolicy> npg_actor_step(const NpgPolicy& policy,
                                                const Eigen::VectorXd& u, double eta);

enum class CriticMode {
  /// Targets from geometric-horizon rollouts at pairs drawn from rho.
  monte_carlo,
  /// Exact targets at every state-action pair of a tabular MDP.
  exact_dp
};

/// Tangent-class settings for NPG: coefficient bound B, gradient bound G and
/// Hessian bound Lambda (user-supplied metadata).
struct NpgSettings {
  double coefficient_bound = 10.0;
  double gradient_bound = 1.0;
  double hessian_bound = 0.0;
};

struct PolicyUpdateConfig {
  std::size_t iterations = 10;  // T
  std::size_t samples = 100;    // M
  /// Step size; unset selects the convergence-lemma default for the variant.
  std::optional<double> eta;
  /// Critic bound W used by the default SPI step; unset reads the class bound.
  std::optional<double> critic_bound;
  CriticMode critic = CriticMode::monte_carlo;
  Combiner combiner = Combiner::sum;
  NpgSettings npg;
  /// Ignore rho and draw critic pairs from the current iterate's own
  /// occupancy at s0 (the no-cover baseline).
  bool on_policy = false;

  void validate() const;
};

/// sqrt(log|A| / (16 W^2 T)).
double default_spi_step(std::size_t num_actions, double critic_bound, std::size_t iterations);
/// sqrt(log|A| / ((16 D^2 + Lambda B^2) T)) with D = max(B G, 1 / (1 - gamma)).
double default_npg_step(std::size_t num_actions, const NpgSettings& npg, double gamma,
                        std::size_t iterations);
/// 8 W sqrt(log|A| / T).
double regret_bound(double critic_bound, std::size_t num_actions, std::size_t iterations);

/// Draws a state-action pair, e.g. from the cover distribution.
using PairSampler = std::function<StateAction(Rng&, RolloutCounters*)>;

/// M critic samples with (s, a) ~ rho. SPI targets Q^pi(s, a; r ⊕ b) - b_eff(s, a);
/// NPG targets A^pi(s, a; r ⊕ b) - (b_eff(s, a) - E_pi b_eff(s, .)).
std::vector<CriticSample> collect_critic_samples(const Mdp& mdp, const PairSampler& rho,
                                                 const Policy& policy, const Bonus& bonus,
                                                 std::size_t samples, UpdateAlgorithm algorithm,
                                                 Combiner combiner, Rng& rng,
                                                 RolloutCounters* counters = nullptr);

struct IterationDiagnostics {
  std::size_t iter = 0;
  double critic_loss = 0.0;
  double mean_target = 0.0;
  /// Mean entropy of pi_t over the sampled states.
  double entropy = 0.0;
  std::size_t fit_retries = 0;
  /// Rollouts consumed by the update so far.
  std::uint64_t rollouts = 0;
};

struct PolicyUpdateResult {
  /// Unif(pi_0, ..., pi_{T-1}).
  std::shared_ptr<const MixturePolicy> mixture;
  std::vector<PolicyPtr> iterates;
  /// pi_T, which the mixture excludes.
  PolicyPtr final_iterate;
  std::vector<IterationDiagnostics> diagnostics;
  RolloutCounters counters;
  double eta = 0.0;
};

/// T rounds of collect -> fit -> actor step from pi_0 = init_policy(variant, bonus).
/// For MLP critics a fit whose loss exceeds 4 W^2 is retried once with half
/// the step size before aborting.
PolicyUpdateResult policy_update(const Mdp& mdp, const PairSampler& rho, const Bonus& bonus,
                                 FunctionClassPtr cls, const PolicyUpdateConfig& config,
                                 const UpdateVariant& variant, Rng& rng);

/// Entropy of an action distribution in nats.
double entropy(std::span<const double> probs);

}  // namespace eniac
