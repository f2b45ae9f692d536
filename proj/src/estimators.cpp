#include "eniac/estimators.hpp"

#include <cmath>

namespace eniac {

namespace {

double rollout_sum(const Mdp& mdp, const Policy& markov, State s, std::size_t a,
                   const RewardFn& reward, Rng& rng, RolloutCounters* counters) {
  const double stop = 1.0 - mdp.gamma();
  const std::size_t cap = rollout_step_cap(mdp.gamma());
  double total = reward(s, a);
  std::size_t steps = 0;
  bool truncated = false;
  while (!rng.bernoulli(stop)) {
    if (steps == cap) {
      truncated = true;
      break;
    }
    s = mdp.step(s, a, rng);
    a = markov.act(s, rng);
    total += reward(s, a);
    ++steps;
  }
  if (counters) {
    ++counters->rollouts;
    counters->steps += steps;
    if (truncated) ++counters->truncated;
  }
  return total;
}

}  // namespace

StartSampler start_from_initial(const Mdp& mdp) {
  return [&mdp](Rng& rng) { return StartPoint{mdp.initial_state(rng), std::nullopt}; };
}

StartSampler start_from_pair(State s, std::size_t a) {
  return [s = std::move(s), a](Rng&) { return StartPoint{s, a}; };
}

std::size_t rollout_step_cap(double gamma) {
  return static_cast<std::size_t>(std::ceil(50.0 / (1.0 - gamma)));
}

OccupancyDraw sample_occupancy(const Mdp& mdp, const Policy& policy, const StartSampler& init,
                               Rng& rng, RolloutCounters* counters) {
  const Policy& markov = policy.episode_policy(rng);
  StartPoint start = init(rng);
  State s = std::move(start.state);
  std::size_t a = start.action ? *start.action : markov.act(s, rng);

  const double stop = 1.0 - mdp.gamma();
  const std::size_t cap = rollout_step_cap(mdp.gamma());
  std::size_t t = 0;
  bool truncated = false;
  while (!rng.bernoulli(stop)) {
    if (t == cap) {
      truncated = true;
      break;
    }
    s = mdp.step(s, a, rng);
    a = markov.act(s, rng);
    ++t;
  }
  if (counters) {
    ++counters->rollouts;
    counters->steps += t;
    if (truncated) ++counters->truncated;
  }
  return OccupancyDraw{std::move(s), a, t};
}

double estimate_q(const Mdp& mdp, const Policy& policy, const State& s, std::size_t a,
                  const RewardFn& reward, Rng& rng, RolloutCounters* counters) {
  const Policy& markov = policy.episode_policy(rng);
  return rollout_sum(mdp, markov, s, a, reward, rng, counters);
}

double estimate_v(const Mdp& mdp, const Policy& policy, const State& s, const RewardFn& reward,
                  Rng& rng, RolloutCounters* counters) {
  const Policy& markov = policy.episode_policy(rng);
  const std::size_t a = markov.act(s, rng);
  return rollout_sum(mdp, markov, s, a, reward, rng, counters);
}

double estimate_advantage(const Mdp& mdp, const Policy& policy, const State& s, std::size_t a,
                          const RewardFn& reward, Rng& rng, RolloutCounters* counters) {
  const double q = estimate_q(mdp, policy, s, a, reward, rng, counters);
  const double v = estimate_v(mdp, policy, s, reward, rng, counters);
  return q - v;
}

}  // namespace eniac
