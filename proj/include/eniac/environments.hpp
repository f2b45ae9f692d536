#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "eniac/function_class.hpp"
#include "eniac/mdp.hpp"

namespace eniac {

/// Correct action at cell h of the combination lock.
std::size_t lock_correct_action(std::size_t h, std::size_t num_actions);

/// Chain of H cells (0 .. H-1). The correct action advances one cell; any
/// other action drops into a decoy state that pays delta once and then moves
/// to an absorbing dead state. The last cell is absorbing and pays 1 per step.
/// Layout: cells 0..H-1, decoy = H, dead = H+1; start = 0.
TabularMdp make_combination_lock(std::size_t horizon, double delta, double gamma,
                                 std::size_t num_actions = 2);

/// Single state with one self-looping action per arm; arm a pays means[a].
TabularMdp make_bandit(const std::vector<double>& means, double gamma);

/// width x height grid, actions (up, right, down, left); a move succeeds with
/// probability 1 - slip and otherwise goes in a uniformly random direction.
/// The far corner is absorbing with reward 1; start is the origin.
TabularMdp make_gridworld(std::size_t width, std::size_t height, double slip, double gamma);

/// Plain mountain-car physics on (position, velocity) with force in [-1, 1].
struct MountainCarPhysics {
  static constexpr double kMinPosition = -1.2;
  static constexpr double kMaxPosition = 0.6;
  static constexpr double kMaxSpeed = 0.07;
  static constexpr double kGoalPosition = 0.45;
  static constexpr double kGoalVelocity = 0.0;
  static constexpr double kPower = 0.0015;

  static void step(double& position, double& velocity, double force);
  static bool at_goal(double position, double velocity);
};

/// Mountain car with a discretized force grid and 100-step episodes embedded
/// as a reset: after the goal or the horizon the next transition restarts from
/// a fresh start state. State x = (position, velocity); index = step within
/// the episode.
///
/// Raw reward is +100 on reaching the goal minus 0.1 force^2 per step. The
/// learner sees it mapped affinely into [0, 1]; raw_reward reports the
/// original scale.
class MountainCarMdp final : public Mdp {
 public:
  explicit MountainCarMdp(std::size_t action_grid_size = 7, std::size_t horizon = 100,
                          double gamma = 0.99);

  std::size_t num_actions() const override { return forces_.size(); }
  double gamma() const override { return gamma_; }
  State initial_state(Rng& rng) const override;
  State step(const State& s, std::size_t a, Rng& rng) const override;
  double reward(const State& s, std::size_t a) const override;

  double force(std::size_t a) const { return forces_.at(a); }
  std::size_t horizon() const { return horizon_; }
  /// True at the goal or once the horizon is used up; the next step resets.
  bool episode_over(const State& s) const;
  double raw_reward(const State& s, std::size_t a) const;
  /// Affine map of the raw reward into [0, 1].
  static double scale_reward(double raw);

  /// Undiscounted raw return of one episode from a fresh start state.
  double episode_return(const Policy& policy, Rng& rng, std::size_t* steps = nullptr) const;

 private:
  std::vector<double> forces_;
  std::size_t horizon_;
  double gamma_;
};

std::shared_ptr<MountainCarMdp> make_mountain_car(std::size_t action_grid_size = 7);

/// Hidden-layer presets: 2 -> (64, 64), 4 -> (64, 128, 128, 64), 6 -> (64, 64, 128, 128, 64, 64).
std::vector<std::size_t> network_preset(std::size_t layers);

/// MLP critic over normalized mountain-car states.
std::shared_ptr<MlpClass> mountain_car_mlp(const MountainCarMdp& mdp,
                                           std::vector<std::size_t> hidden, double sup_bound,
                                           MlpFitConfig fit = {});
/// Linear critic over radial bins of the mountain-car box.
std::shared_ptr<LinearClass> mountain_car_linear(const MountainCarMdp& mdp,
                                                 std::size_t bins_per_dim, double bound);

}  // namespace eniac
