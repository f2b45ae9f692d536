#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "eniac/rng.hpp"

namespace eniac {

/// Continuous part of a state. Capacity is fixed so states never allocate.
using StateVector = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, 8, 1>;

/// A state of either a tabular MDP (`index` only) or a continuous one
/// (`x` non-empty; `index` is free for environment bookkeeping such as a step
/// counter).
struct State {
  std::size_t index = 0;
  StateVector x;

  static State discrete(std::size_t i) { return State{i, StateVector()}; }
  static State continuous(std::initializer_list<double> values, std::size_t tag = 0);

  bool is_discrete() const { return x.size() == 0; }

  friend bool operator==(const State& a, const State& b) {
    return a.index == b.index && a.x.size() == b.x.size() && a.x == b.x;
  }
};

struct StateAction {
  State state;
  std::size_t action = 0;
};

/// Reward used by estimators; the MDP's own reward is one instance, r + b another.
using RewardFn = std::function<double(const State&, std::size_t)>;

/// Environment contract: finite action set shared by all states, stochastic
/// transitions, reward in [0, 1], discount in (0, 1), and a start state.
class Mdp {
 public:
  virtual ~Mdp() = default;

  virtual std::size_t num_actions() const = 0;
  virtual double gamma() const = 0;
  /// Start state; may be random (e.g. a start basin), hence the stream.
  virtual State initial_state(Rng& rng) const = 0;
  virtual State step(const State& s, std::size_t a, Rng& rng) const = 0;
  virtual double reward(const State& s, std::size_t a) const = 0;
  /// Number of states when the state space is enumerable.
  virtual std::optional<std::size_t> num_states() const { return std::nullopt; }

  RewardFn reward_fn() const;
};

/// Explicit P[s][a][s'], r[s][a] model; the substrate for exact oracles.
class TabularMdp final : public Mdp {
 public:
  /// `transitions[s][a]` is a dense row over next states.
  TabularMdp(std::vector<std::vector<std::vector<double>>> transitions,
             std::vector<std::vector<double>> rewards, double gamma,
             std::size_t initial_state);

  std::size_t num_actions() const override { return num_actions_; }
  double gamma() const override { return gamma_; }
  State initial_state(Rng&) const override { return State::discrete(initial_state_); }
  State step(const State& s, std::size_t a, Rng& rng) const override;
  double reward(const State& s, std::size_t a) const override {
    return rewards_[s.index][a];
  }
  std::optional<std::size_t> num_states() const override { return num_states_; }

  std::size_t state_count() const { return num_states_; }
  std::size_t start() const { return initial_state_; }
  double probability(std::size_t s, std::size_t a, std::size_t next) const {
    return transitions_[s][a][next];
  }
  double reward_at(std::size_t s, std::size_t a) const { return rewards_[s][a]; }
  const std::vector<std::vector<std::vector<double>>>& transitions() const {
    return transitions_;
  }
  const std::vector<std::vector<double>>& rewards() const { return rewards_; }

 private:
  struct Support {
    std::vector<std::size_t> next;
    std::vector<double> cumulative;
  };

  std::size_t num_states_;
  std::size_t num_actions_;
  std::vector<std::vector<std::vector<double>>> transitions_;
  std::vector<std::vector<double>> rewards_;
  double gamma_;
  std::size_t initial_state_;
  std::vector<Support> support_;  // indexed s * |A| + a
};

/// A stochastic policy over the MDP's finite action set.
///
/// Mixtures are trajectory-level: a rollout first calls `episode_policy` to
/// pick the component it follows for the whole trajectory.
class Policy {
 public:
  virtual ~Policy() = default;

  virtual std::size_t num_actions() const = 0;
  virtual void action_probabilities(const State& s, std::span<double> out) const = 0;

  /// Markov policy driving one trajectory. Non-mixtures return themselves.
  virtual const Policy& episode_policy(Rng&) const { return *this; }
  /// False for trajectory-level mixtures; exact DP needs a Markov policy.
  virtual bool is_markov() const { return true; }

  std::size_t act(const State& s, Rng& rng) const;
  std::vector<double> probabilities(const State& s) const;
};

using PolicyPtr = std::shared_ptr<const Policy>;

class UniformPolicy final : public Policy {
 public:
  explicit UniformPolicy(std::size_t num_actions) : num_actions_(num_actions) {}
  std::size_t num_actions() const override { return num_actions_; }
  void action_probabilities(const State&, std::span<double> out) const override;

 private:
  std::size_t num_actions_;
};

/// Explicit per-state action table for discrete states.
class TabularPolicy final : public Policy {
 public:
  explicit TabularPolicy(std::vector<std::vector<double>> table);
  /// Materializes `policy` on states 0..num_states-1.
  static std::shared_ptr<TabularPolicy> tabulate(const Policy& policy, std::size_t num_states);
  static std::shared_ptr<TabularPolicy> deterministic(const std::vector<std::size_t>& actions,
                                                      std::size_t num_actions);

  std::size_t num_actions() const override { return num_actions_; }
  void action_probabilities(const State& s, std::span<double> out) const override;
  const std::vector<std::vector<double>>& table() const { return table_; }

 private:
  std::size_t num_actions_;
  std::vector<std::vector<double>> table_;
};

/// Uniform trajectory-level mixture of component policies.
class MixturePolicy final : public Policy {
 public:
  explicit MixturePolicy(std::vector<PolicyPtr> components);

  std::size_t num_actions() const override;
  /// State-marginal average of the components' action laws (display only).
  void action_probabilities(const State& s, std::span<double> out) const override;
  const Policy& episode_policy(Rng& rng) const override;
  bool is_markov() const override { return false; }

  const std::vector<PolicyPtr>& components() const { return components_; }

 private:
  std::vector<PolicyPtr> components_;
};

/// Softmax with max subtraction, written into `out` (same length as `logits`).
void softmax(std::span<const double> logits, std::span<double> out);

/// Index drawn from a probability vector.
std::size_t sample_index(std::span<const double> probs, Rng& rng);

}  // namespace eniac
