#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "eniac/eniac.hpp"
#include "eniac/environments.hpp"
#include "eniac/neural_width.hpp"
#include "eniac/ppo.hpp"

namespace eniac {

struct EnvironmentConfig {
  /// combination-lock | gridworld | bandit | mountain-car
  std::string id = "combination-lock";
  std::size_t horizon = 15;
  double delta = 0.01;
  double gamma = 0.97;
  std::size_t num_actions = 2;
  std::size_t width = 5, height = 5;
  double slip = 0.1;
  std::vector<double> arm_means = {0.2, 0.5, 0.8};
  std::size_t action_grid = 7;
};

struct ClassConfig {
  /// tabular | linear | mlp
  std::string kind = "tabular";
  /// Coefficient bound (tabular / linear) or output clamp (mlp); 0 picks 1 / (1 - gamma).
  double bound = 0.0;
  std::size_t layers = 2;
  std::size_t bins = 6;
  MlpFitConfig fit;
};

/// Settings that only the network experiment loop reads.
struct ExperimentModeConfig {
  PpoConfig ppo;
  WidthTrainConfig width;
  /// Occupancy draws appended to the buffer per epoch.
  std::size_t buffer_draws = 200;
  std::size_t explorer_updates = 3;
  std::size_t exploit_updates = 3;
  std::uint64_t max_env_steps = 3'000'000;
  std::size_t eval_episodes = 10;
  /// Episode cut for environments without their own episode boundary.
  std::size_t episode_length = 100;
};

struct RunConfig {
  EnvironmentConfig environment;
  /// eniac | zero-bonus | vanilla-pg (pc-pg and ppo-rnd are registered but not built)
  std::string algorithm = "eniac";
  ClassConfig function_class;
  EniacConfig eniac;
  std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4};
  /// No rows after an evaluation above this; unset picks 93 on mountain car.
  std::optional<double> stop_threshold;
  /// Episodes per evaluation row on tabular environments.
  std::size_t eval_episodes = 500;
  bool experiment = false;
  ExperimentModeConfig experiment_mode;

  void validate() const;
  std::optional<double> resolved_stop_threshold() const;
};

std::string run_config_to_json(const RunConfig& config);
/// Missing keys keep their defaults; unknown keys and bad values throw
/// std::invalid_argument.
RunConfig run_config_from_json(const std::string& text);
RunConfig load_run_config(const std::string& path);

bool is_known_algorithm(const std::string& id);

struct MetricsRow {
  std::uint64_t episode = 0;
  double mean_return = 0.0;
  std::size_t epochs_used = 0;
  std::uint64_t seed = 0;
};

void write_metrics_csv(std::ostream& out, const std::vector<MetricsRow>& rows);

struct RunOutcome {
  std::uint64_t seed = 0;
  std::vector<MetricsRow> rows;
  bool reached_threshold = false;
  /// Ran out of epochs or env steps without reaching the stop threshold.
  bool budget_exhausted = false;
  double final_return = std::numeric_limits<double>::quiet_NaN();
  /// Exact value of the final policy on tabular environments.
  double final_exact = std::numeric_limits<double>::quiet_NaN();
  std::uint64_t env_steps = 0;
  /// Final output policy.
  PolicyPtr policy;
};

/// Environment and class built from a config.
struct Problem {
  std::shared_ptr<const Mdp> mdp;
  FunctionClassPtr cls;
  std::string environment_name;
  std::string class_name;
};

Problem build_problem(const RunConfig& config);

/// Mean of `episodes` value draws at s0 under the MDP's own reward.
double evaluate_policy(const Mdp& mdp, const Policy& policy, std::size_t episodes, Rng& rng);
/// Mean raw return on mountain car; `evaluate_policy` elsewhere.
double evaluate_return(const Mdp& mdp, const Policy& policy, std::size_t episodes, Rng& rng);

/// One seed of one algorithm.
RunOutcome run_single(const RunConfig& config, std::uint64_t seed);

/// Every configured seed; writes metrics.csv and manifest.json into `out_dir`
/// when it is non-empty.
std::vector<RunOutcome> run_experiment(const RunConfig& config, const std::string& out_dir);

}  // namespace eniac
