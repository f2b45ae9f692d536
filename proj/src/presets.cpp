#include "eniac/presets.hpp"

#include <cmath>
#include <numbers>

namespace eniac {

RunConfig lock_benchmark(const std::string& algorithm) {
  RunConfig c;
  c.environment.id = "combination-lock";
  c.environment.horizon = 15;
  c.environment.delta = 0.01;
  c.environment.gamma = 0.97;
  c.algorithm = algorithm;
  c.function_class.kind = "tabular";
  EniacConfig& e = c.eniac;
  e.epochs = 20;
  e.rollouts = 300;
  e.radius = 0.1;
  e.beta = 0.5;
  e.update.iterations = 100;
  e.update.samples = 300;
  e.update.eta = 1.0;
  e.exploit_rollouts = 500;
  c.eval_episodes = 500;
  return c;
}

RunConfig bandit_benchmark(std::size_t iterations) {
  RunConfig c;
  c.environment.id = "bandit";
  c.environment.gamma = 0.5;
  c.environment.arm_means = {0.2, 0.5, 0.8};
  c.algorithm = "eniac";
  c.function_class.kind = "tabular";
  c.function_class.bound = 100.0;
  EniacConfig& e = c.eniac;
  e.epochs = 1;
  e.rollouts = 1;
  e.bonus_kind = BonusKind::zero;
  e.update.iterations = iterations;
  e.update.critic = CriticMode::exact_dp;
  e.update.critic_bound = 1.0 / (1.0 - c.environment.gamma);
  return c;
}

RunConfig mountain_car_benchmark(const std::string& algorithm, std::size_t layers) {
  RunConfig c;
  c.environment.id = "mountain-car";
  c.environment.gamma = 0.99;
  c.environment.action_grid = 7;
  c.algorithm = algorithm;
  c.function_class.kind = "mlp";
  c.function_class.layers = layers;
  c.function_class.bound = 1.0 / (1.0 - 0.99);
  c.experiment = true;
  c.eniac.epochs = 1000;
  c.experiment_mode.max_env_steps = 3'000'000;
  c.stop_threshold = 93.0;
  return c;
}

RingFixture make_ring_fixture(Rng& rng, std::size_t buffer_size, std::size_t query_set_size,
                              std::size_t probes) {
  RingFixture f;
  f.arch = MlpClass::for_continuous(Eigen::VectorXd::Zero(2), Eigen::VectorXd::Constant(2, 2.0),
                                    network_preset(2), 1, 1e9);
  auto on_ring = [&rng] {
    const double t = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const double r = 1.0 + 0.05 * rng.uniform(-1.0, 1.0);
    return State::continuous({r * std::cos(t), r * std::sin(t)});
  };
  for (std::size_t i = 0; i < buffer_size; ++i) f.buffer.append(on_ring(), 0);
  for (std::size_t i = 0; i < query_set_size; ++i)
    f.query_set.append(State::continuous({rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)}), 0);
  for (std::size_t i = 0; i < probes; ++i) f.buffer_probes.append(on_ring(), 0);
  // Half the far probes sit near the center, half outside the ring.
  for (std::size_t i = 0; i < probes; ++i) {
    const double t = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const double r = i % 2 == 0 ? rng.uniform(0.0, 0.3) : rng.uniform(1.7, 2.0);
    f.far_probes.append(State::continuous({r * std::cos(t), r * std::sin(t)}), 0);
  }
  return f;
}

}  // namespace eniac
