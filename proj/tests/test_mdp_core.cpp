#include <cmath>
#include <map>

#include "doctest.h"
#include "eniac/dynamic_programming.hpp"
#include "eniac/estimators.hpp"
#include "eniac/tabular_io.hpp"
#include "fixtures.hpp"

using namespace eniac;

namespace {

TabularMdp single_state(double gamma) {
  return TabularMdp({{{1.0}}}, {{1.0}}, gamma, 0);
}

}  // namespace

TEST_CASE("rng streams are reproducible and splits differ") {
  Rng a(42), b(42);
  for (int i = 0; i < 10; ++i) CHECK(a.next_u64() == b.next_u64());
  Rng c = a.split(), d = a.split();
  CHECK(c.next_u64() != d.next_u64());
  Rng e(7);
  for (int i = 0; i < 1000; ++i) {
    const double u = e.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(e.index(3) < 3);
  }
}

TEST_CASE("tabular mdp rejects malformed tables") {
  CHECK_THROWS_AS(TabularMdp({{{0.5}}}, {{0.0}}, 0.9, 0), std::invalid_argument);
  CHECK_THROWS_AS(TabularMdp({{{1.0}}}, {{2.0}}, 0.9, 0), std::invalid_argument);
  CHECK_THROWS_AS(TabularMdp({{{1.0}}}, {{0.0}}, 1.0, 0), std::invalid_argument);
  CHECK_THROWS_AS(TabularMdp({{{1.0}}}, {{0.0}}, 0.9, 3), std::invalid_argument);
}

TEST_CASE("stopping time of the occupancy sampler is geometric") {
  const TabularMdp m = single_state(0.5);
  UniformPolicy pi(1);
  Rng rng(1);
  std::map<std::size_t, int> counts;
  const int draws = 100000;
  for (int i = 0; i < draws; ++i)
    ++counts[sample_occupancy(m, pi, start_from_initial(m), rng).stop_step];
  for (std::size_t k = 0; k < 5; ++k) {
    const double expected = 0.5 * std::pow(0.5, static_cast<double>(k));
    CHECK(std::abs(counts[k] / double(draws) - expected) <= 0.01);
  }
}

TEST_CASE("symmetric two-state chain has a half-half occupancy") {
  const TabularMdp m({{{0.5, 0.5}}, {{0.5, 0.5}}}, {{0.0}, {0.0}}, 0.9, 0);
  UniformPolicy pi(1);
  Rng rng(2);
  StartSampler coin = [](Rng& r) { return StartPoint{State::discrete(r.index(2)), std::nullopt}; };
  int zero = 0;
  const int draws = 100000;
  for (int i = 0; i < draws; ++i)
    if (sample_occupancy(m, pi, coin, rng).state.index == 0) ++zero;
  CHECK(std::abs(zero / double(draws) - 0.5) <= 0.01);
}

TEST_CASE("constant reward on a single state gives Q = 1 / (1 - gamma)") {
  const TabularMdp m = single_state(0.5);
  UniformPolicy pi(1);
  Rng rng(3);
  double total = 0.0;
  const int draws = 20000;
  for (int i = 0; i < draws; ++i)
    total += estimate_q(m, pi, State::discrete(0), 0, m.reward_fn(), rng);
  const double mean = total / draws;
  CHECK(mean >= 1.9);
  CHECK(mean <= 2.1);
}

TEST_CASE("value iteration agrees with the linear-system oracle") {
  Rng rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    const TabularMdp m = fixtures::random_mdp(rng, 6, 3, 0.9);
    auto table = fixtures::random_policy_table(rng, 6, 3);
    TabularPolicy pi(table);
    const QTable q = exact_q_dp(m, pi, reward_table(m));
    const Eigen::MatrixXd oracle = fixtures::solve_q(m, table, fixtures::own_reward(m));
    CHECK((q - oracle).cwiseAbs().maxCoeff() < 1e-8);
    CHECK(std::abs(exact_value(m, pi, reward_table(m)) - fixtures::value_at_start(m, table)) <
          1e-8);
  }
}

TEST_CASE("exact_q_dp refuses mixtures and non-tabular MDPs") {
  const TabularMdp m = fixtures::chain5();
  auto u = std::make_shared<UniformPolicy>(2);
  MixturePolicy mix({u, u});
  CHECK_THROWS_AS(exact_q_dp(m, mix, reward_table(m)), std::invalid_argument);
}

TEST_CASE("Monte-Carlo Q matches the oracle on a random MDP") {
  Rng rng(5);
  const TabularMdp m = fixtures::random_mdp(rng, 3, 2, 0.8);
  auto table = fixtures::random_policy_table(rng, 3, 2);
  TabularPolicy pi(table);
  const Eigen::MatrixXd oracle = fixtures::solve_q(m, table, fixtures::own_reward(m));
  for (std::size_t s = 0; s < 3; ++s)
    for (std::size_t a = 0; a < 2; ++a) {
      double total = 0.0;
      const int draws = 20000;
      for (int i = 0; i < draws; ++i)
        total += estimate_q(m, pi, State::discrete(s), a, m.reward_fn(), rng);
      CHECK(std::abs(total / draws - oracle(s, a)) < 0.1);
    }
}

TEST_CASE("advantage estimates average to the exact advantage") {
  Rng rng(6);
  const TabularMdp m = fixtures::random_mdp(rng, 3, 2, 0.7);
  auto table = fixtures::random_policy_table(rng, 3, 2);
  TabularPolicy pi(table);
  const QTable q = exact_q_dp(m, pi, reward_table(m));
  const QTable adv = advantages(q, policy_table(pi, 3));
  double total = 0.0;
  const int draws = 40000;
  for (int i = 0; i < draws; ++i)
    total += estimate_advantage(m, pi, State::discrete(1), 0, m.reward_fn(), rng);
  CHECK(std::abs(total / draws - adv(1, 0)) < 0.1);
}

TEST_CASE("occupancy draws follow the exact discounted occupancy") {
  Rng rng(7);
  const TabularMdp m = fixtures::random_mdp(rng, 4, 2, 0.8);
  auto table = fixtures::random_policy_table(rng, 4, 2);
  TabularPolicy pi(table);
  const QTable d = exact_occupancy(m, pi);
  CHECK(std::abs(d.sum() - 1.0) < 1e-9);
  Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(4, 2);
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) {
    OccupancyDraw o = sample_occupancy(m, pi, start_from_initial(m), rng);
    counts(o.state.index, o.action) += 1.0;
  }
  CHECK((counts / draws - d).cwiseAbs().maxCoeff() < 0.01);
}

TEST_CASE("mixture value is the mean of component values") {
  Rng rng(8);
  const TabularMdp m = fixtures::random_mdp(rng, 5, 3, 0.9);
  std::vector<PolicyPtr> parts;
  double mean = 0.0;
  for (int i = 0; i < 4; ++i) {
    auto t = fixtures::random_policy_table(rng, 5, 3);
    mean += fixtures::value_at_start(m, t) / 4.0;
    parts.push_back(std::make_shared<TabularPolicy>(t));
  }
  MixturePolicy mix(parts);
  CHECK(std::abs(exact_value(m, mix, reward_table(m)) - mean) < 1e-6);
}

TEST_CASE("rollout counters record every transition") {
  const TabularMdp m = fixtures::chain5();
  UniformPolicy pi(2);
  Rng rng(9);
  RolloutCounters c;
  std::size_t steps = 0;
  for (int i = 0; i < 100; ++i) steps += sample_occupancy(m, pi, start_from_initial(m), rng, &c).stop_step;
  CHECK(c.rollouts == 100);
  CHECK(c.steps == steps);
  CHECK(rollout_step_cap(0.9) >= 500);
  CHECK(rollout_step_cap(0.9) <= 501);
}

TEST_CASE("tabular mdp json round trip") {
  Rng rng(10);
  const TabularMdp m = fixtures::random_mdp(rng, 3, 2, 0.95);
  const TabularMdp back = tabular_mdp_from_json(tabular_mdp_to_json(m));
  CHECK(back.state_count() == 3);
  CHECK(back.gamma() == m.gamma());
  for (std::size_t s = 0; s < 3; ++s)
    for (std::size_t a = 0; a < 2; ++a) {
      CHECK(back.reward_at(s, a) == m.reward_at(s, a));
      for (std::size_t t = 0; t < 3; ++t) CHECK(back.probability(s, a, t) == m.probability(s, a, t));
    }
  CHECK_THROWS_AS(tabular_mdp_from_json("{\"format\": \"nope\"}"), std::invalid_argument);
}

TEST_CASE("softmax is shift invariant and sums to one") {
  std::vector<double> lg = {1000.0, 1001.0, 999.0}, p(3), q(3);
  softmax(lg, p);
  std::vector<double> shifted = {0.0, 1.0, -1.0};
  softmax(shifted, q);
  double total = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(p[i] == doctest::Approx(q[i]).epsilon(1e-12));
    total += p[i];
  }
  CHECK(total == doctest::Approx(1.0));
}
