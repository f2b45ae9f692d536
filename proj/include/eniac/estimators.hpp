#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>

#include "eniac/mdp.hpp"

namespace eniac {

/// Rollout bookkeeping shared by every estimator and sampler.
struct RolloutCounters {
  std::uint64_t rollouts = 0;
  std::uint64_t steps = 0;
  /// Rollouts stopped by the 50 / (1 - gamma) safety cap.
  std::uint64_t truncated = 0;

  RolloutCounters& operator+=(const RolloutCounters& o) {
    rollouts += o.rollouts;
    steps += o.steps;
    truncated += o.truncated;
    return *this;
  }
};

/// Start of an occupancy rollout: a state and, optionally, a fixed first
/// action (otherwise the first action is drawn from the rollout policy).
struct StartPoint {
  State state;
  std::optional<std::size_t> action;
};

using StartSampler = std::function<StartPoint(Rng&)>;

/// Start from the MDP's initial state with the policy's first action (d^pi_{s0}).
StartSampler start_from_initial(const Mdp& mdp);
/// Start from a fixed state-action pair (d^pi_{(s,a)}).
StartSampler start_from_pair(State s, std::size_t a);

struct OccupancyDraw {
  State state;
  std::size_t action = 0;
  /// Number of transitions taken before stopping.
  std::size_t stop_step = 0;
};

/// Hard per-rollout step cap, ceil(50 / (1 - gamma)).
std::size_t rollout_step_cap(double gamma);

/// Draws (s_t, a_t) at a Geometric(1 - gamma) stopping time; its law is the
/// discounted occupancy of `policy` from the start distribution.
OccupancyDraw sample_occupancy(const Mdp& mdp, const Policy& policy, const StartSampler& init,
                               Rng& rng, RolloutCounters* counters = nullptr);

/// Undiscounted reward sum over a geometric-length trajectory started at
/// (s, a); unbiased for Q^pi(s, a, reward).
double estimate_q(const Mdp& mdp, const Policy& policy, const State& s, std::size_t a,
                  const RewardFn& reward, Rng& rng, RolloutCounters* counters = nullptr);

/// As `estimate_q` with the first action drawn from the policy.
double estimate_v(const Mdp& mdp, const Policy& policy, const State& s, const RewardFn& reward,
                  Rng& rng, RolloutCounters* counters = nullptr);

/// One Q draw minus one independent V draw.
double estimate_advantage(const Mdp& mdp, const Policy& policy, const State& s, std::size_t a,
                          const RewardFn& reward, Rng& rng, RolloutCounters* counters = nullptr);

}  // namespace eniac
