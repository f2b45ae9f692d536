#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "eniac/dynamic_programming.hpp"
#include "eniac/environments.hpp"
#include "eniac/experiment.hpp"
#include "eniac/presets.hpp"
#include "fixtures.hpp"

using namespace eniac;

namespace {

// Push in the direction of motion; left when at rest.
class BangBang final : public Policy {
 public:
  std::size_t num_actions() const override { return 7; }
  void action_probabilities(const State& s, std::span<double> out) const override {
    std::fill(out.begin(), out.end(), 0.0);
    out[s.x[1] > 0.0 ? 6 : 0] = 1.0;
  }
};

class Constant final : public Policy {
 public:
  Constant(std::size_t n, std::size_t a) : n_(n), a_(a) {}
  std::size_t num_actions() const override { return n_; }
  void action_probabilities(const State&, std::span<double> out) const override {
    std::fill(out.begin(), out.end(), 0.0);
    out[a_] = 1.0;
  }

 private:
  std::size_t n_, a_;
};

void check_rows_stochastic(const TabularMdp& m) {
  for (std::size_t s = 0; s < m.state_count(); ++s)
    for (std::size_t a = 0; a < m.num_actions(); ++a) {
      double total = 0.0;
      for (std::size_t t = 0; t < m.state_count(); ++t) {
        CHECK(m.probability(s, a, t) >= 0.0);
        total += m.probability(s, a, t);
      }
      CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
}

RunConfig tiny_lock(const std::string& algorithm) {
  RunConfig c;
  c.environment.horizon = 4;
  c.environment.gamma = 0.8;
  c.algorithm = algorithm;
  c.eniac.epochs = 3;
  c.eniac.rollouts = 20;
  c.eniac.beta = 0.5;
  c.eniac.update.iterations = 5;
  c.eniac.update.samples = 20;
  c.eniac.update.eta = 1.0;
  c.eniac.evaluate_every = 1;
  c.eniac.exploit_rollouts = 50;
  c.eval_episodes = 50;
  c.seeds = {0, 1};
  return c;
}

}  // namespace

TEST_CASE("two-cell lock by hand") {
  const TabularMdp m = make_combination_lock(2, 0.0, 0.5);
  // Goal pays 1 forever: V(goal) = 2; V(0) = 0.5 * 2 under the correct action.
  CHECK(optimal_value(m) == doctest::Approx(1.0));
  CHECK(lock_correct_action(0, 2) == 1);
  CHECK(m.state_count() == 4);
  const std::size_t decoy = 2;
  for (std::size_t a = 0; a < 2; ++a) CHECK(m.reward_at(decoy, a) == 0.0);
  check_rows_stochastic(m);
  // The wrong first action earns nothing.
  CHECK(m.probability(0, 1 - lock_correct_action(0, 2), decoy) == 1.0);
}

TEST_CASE("lock and gridworld transition rows are distributions") {
  check_rows_stochastic(make_combination_lock(15, 0.01, 0.97));
  check_rows_stochastic(make_combination_lock(6, 0.1, 0.9, 4));
  check_rows_stochastic(make_gridworld(4, 3, 0.2, 0.9));
  const TabularMdp lock = make_combination_lock(15, 0.01, 0.97);
  CHECK(lock.reward_at(15, 0) == doctest::Approx(0.01));
  CHECK(optimal_value(lock) == doctest::Approx(std::pow(0.97, 14) / 0.03).epsilon(1e-9));
}

TEST_CASE("mountain car physics against a reference integrator") {
  Rng rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    double p = rng.uniform(-1.2, 0.5), v = rng.uniform(-0.07, 0.07);
    double rp = p, rv = v;
    for (int k = 0; k < 10; ++k) {
      const double force = rng.uniform(-1.5, 1.5);
      MountainCarPhysics::step(p, v, force);
      const double f = force < -1.0 ? -1.0 : force > 1.0 ? 1.0 : force;
      rv = rv + 0.0015 * f - 0.0025 * std::cos(3.0 * rp);
      if (rv > 0.07) rv = 0.07;
      if (rv < -0.07) rv = -0.07;
      rp = rp + rv;
      if (rp > 0.6) rp = 0.6;
      if (rp < -1.2) {
        rp = -1.2;
        if (rv < 0.0) rv = 0.0;
      }
      CHECK(std::abs(p - rp) < 1e-9);
      CHECK(std::abs(v - rv) < 1e-9);
    }
  }
}

TEST_CASE("mountain car returns") {
  const auto car = make_mountain_car();
  CHECK(car->force(3) == 0.0);
  Rng rng(2);
  const Constant idle(7, 3);
  for (int i = 0; i < 5; ++i) CHECK(car->episode_return(idle, rng) <= 0.0);
  const BangBang pump;
  for (int i = 0; i < 10; ++i) {
    std::size_t steps = 0;
    const double ret = car->episode_return(pump, rng, &steps);
    CHECK(steps < car->horizon());
    CHECK(ret >= 100.0 - 0.1 * double(steps) - 1e-9);
  }
  CHECK(MountainCarMdp::scale_reward(-0.1) == 0.0);
  CHECK(MountainCarMdp::scale_reward(100.0) == doctest::Approx(1.0));
}

TEST_CASE("mountain car resets after an episode") {
  const auto car = make_mountain_car();
  Rng rng(3);
  State s = State::continuous({-0.5, 0.0}, car->horizon());
  CHECK(car->episode_over(s));
  CHECK(car->reward(s, 6) == 0.0);
  const State next = car->step(s, 6, rng);
  CHECK(next.index == 0);
  CHECK(next.x[1] == 0.0);
}

TEST_CASE("policy evaluation") {
  Rng rng(4);
  const TabularMdp zero({{{1.0}}}, {{0.0}}, 0.9, 0);
  CHECK(evaluate_policy(zero, UniformPolicy(1), 100, rng) == 0.0);

  const TabularMdp m = fixtures::random_mdp(rng, 4, 2, 0.8);
  const auto table = fixtures::random_policy_table(rng, 4, 2);
  CHECK(std::abs(evaluate_policy(m, TabularPolicy(table), 20000, rng) - fixtures::value_at_start(m, table)) <
        0.05);

  std::vector<PolicyPtr> parts;
  double mean = 0.0;
  for (std::size_t a = 0; a < 2; ++a) {
    const auto t = std::vector<std::vector<double>>(4, a == 0 ? std::vector<double>{1.0, 0.0}
                                                               : std::vector<double>{0.0, 1.0});
    parts.push_back(std::make_shared<TabularPolicy>(t));
    mean += fixtures::value_at_start(m, t) / 2.0;
  }
  CHECK(std::abs(evaluate_policy(m, MixturePolicy(parts), 20000, rng) - mean) < 0.05);
}

TEST_CASE("metrics csv header") {
  std::ostringstream out;
  write_metrics_csv(out, {MetricsRow{10, 0.5, 1, 3}});
  CHECK(out.str().rfind("episode,mean_return,epochs_used,seed\n10,", 0) == 0);
}

TEST_CASE("stop rule ends a run at the first evaluation above the threshold") {
  RunConfig c = tiny_lock("eniac");
  c.stop_threshold = -1.0;
  const RunOutcome hit = run_single(c, 0);
  CHECK(hit.reached_threshold);
  CHECK_FALSE(hit.budget_exhausted);
  CHECK(hit.rows.size() == 1);

  c.stop_threshold = 1e9;
  const RunOutcome miss = run_single(c, 0);
  CHECK_FALSE(miss.reached_threshold);
  CHECK(miss.budget_exhausted);
  CHECK(miss.rows.size() == c.eniac.epochs);
  for (std::size_t i = 1; i < miss.rows.size(); ++i) CHECK(miss.rows[i].episode > miss.rows[i - 1].episode);

  c.stop_threshold.reset();
  CHECK_FALSE(run_single(c, 0).budget_exhausted);
  CHECK(mountain_car_benchmark("eniac").resolved_stop_threshold() == doctest::Approx(93.0));
}

TEST_CASE("out-of-scope and unknown algorithms") {
  for (const char* algo : {"pc-pg", "ppo-rnd"}) {
    RunConfig c = tiny_lock(algo);
    CHECK(is_known_algorithm(algo));
    try {
      c.validate();
      FAIL("expected a throw");
    } catch (const std::exception& e) {
      CHECK(std::string(e.what()).find("out of scope") != std::string::npos);
    }
  }
  RunConfig c = tiny_lock("dqn");
  CHECK_FALSE(is_known_algorithm("dqn"));
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("run config json round trip and strictness") {
  const RunConfig c = mountain_car_benchmark("zero-bonus", 4);
  const std::string text = run_config_to_json(c);
  CHECK(run_config_to_json(run_config_from_json(text)) == text);
  CHECK_THROWS_AS(run_config_from_json("{\"algorithm\": \"eniac\", \"bogus\": 1}"), std::invalid_argument);
  CHECK_THROWS_AS(run_config_from_json("{\"environment\": {\"id\": \"pong\"}}"), std::invalid_argument);
  CHECK_THROWS_AS(run_config_from_json("not json"), std::invalid_argument);
}

TEST_CASE("baselines run on the lock and write metrics") {
  const auto dir = std::filesystem::temp_directory_path() / "eniac_bench_test";
  std::filesystem::remove_all(dir);
  for (const char* algo : {"eniac", "zero-bonus", "vanilla-pg"}) {
    const RunConfig c = tiny_lock(algo);
    const auto outcomes = run_experiment(c, dir.string());
    REQUIRE(outcomes.size() == 2);
    for (const auto& o : outcomes) {
      CHECK(o.rows.size() == c.eniac.epochs);
      CHECK(std::isfinite(o.final_exact));
      CHECK(o.policy != nullptr);
    }
    std::ifstream csv(dir / "metrics.csv");
    std::string header;
    std::getline(csv, header);
    CHECK(header == "episode,mean_return,epochs_used,seed");
    CHECK(std::filesystem::exists(dir / "manifest.json"));
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("benchmark presets") {
  const RunConfig lock = lock_benchmark("eniac");
  CHECK(lock.environment.horizon == 15);
  CHECK(lock.environment.delta == doctest::Approx(0.01));
  CHECK(lock.environment.gamma == doctest::Approx(0.97));
  lock.validate();
  bandit_benchmark(100).validate();
  const RunConfig car = mountain_car_benchmark("eniac");
  CHECK(car.experiment);
  CHECK(car.function_class.kind == "mlp");
  car.validate();
}
