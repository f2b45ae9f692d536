#include "eniac/dynamic_programming.hpp"

#include <cmath>
#include <stdexcept>

namespace eniac {

namespace {

const TabularMdp& as_tabular(const Mdp& mdp) {
  const auto* tab = dynamic_cast<const TabularMdp*>(&mdp);
  if (!tab) throw std::invalid_argument("exact DP requires a TabularMdp");
  return *tab;
}

// (P V)(s, a) = sum_{s'} P(s'|s,a) V(s').
QTable expected_next(const TabularMdp& mdp, const Eigen::VectorXd& v) {
  const std::size_t ns = mdp.state_count(), na = mdp.num_actions();
  QTable out(ns, na);
  for (std::size_t s = 0; s < ns; ++s)
    for (std::size_t a = 0; a < na; ++a) {
      const auto& row = mdp.transitions()[s][a];
      double acc = 0.0;
      for (std::size_t n = 0; n < ns; ++n)
        if (row[n] != 0.0) acc += row[n] * v[static_cast<Eigen::Index>(n)];
      out(s, a) = acc;
    }
  return out;
}

}  // namespace

QTable reward_table(const TabularMdp& mdp, const RewardFn& reward) {
  QTable r(mdp.state_count(), mdp.num_actions());
  for (std::size_t s = 0; s < mdp.state_count(); ++s)
    for (std::size_t a = 0; a < mdp.num_actions(); ++a) r(s, a) = reward(State::discrete(s), a);
  return r;
}

QTable reward_table(const TabularMdp& mdp) { return reward_table(mdp, mdp.reward_fn()); }

QTable policy_table(const Policy& policy, std::size_t num_states) {
  if (!policy.is_markov())
    throw std::invalid_argument("policy_table: mixture policies have no single action table");
  QTable pi(num_states, policy.num_actions());
  std::vector<double> buf(policy.num_actions());
  for (std::size_t s = 0; s < num_states; ++s) {
    policy.action_probabilities(State::discrete(s), buf);
    for (std::size_t a = 0; a < buf.size(); ++a) pi(s, a) = buf[a];
  }
  return pi;
}

Eigen::VectorXd state_values(const QTable& q, const QTable& pi) {
  return q.cwiseProduct(pi).rowwise().sum();
}

QTable advantages(const QTable& q, const QTable& pi) {
  return q.colwise() - state_values(q, pi);
}

QTable exact_q_dp(const Mdp& mdp_in, const Policy& policy, const QTable& reward, double tol) {
  const TabularMdp& mdp = as_tabular(mdp_in);
  if (!(tol > 0.0)) throw std::invalid_argument("exact_q_dp: tol must be positive");
  const QTable pi = policy_table(policy, mdp.state_count());
  QTable q = QTable::Zero(mdp.state_count(), mdp.num_actions());
  for (;;) {
    QTable next = reward + mdp.gamma() * expected_next(mdp, state_values(q, pi));
    const double residual = (next - q).cwiseAbs().maxCoeff();
    q = std::move(next);
    if (residual <= tol) return q;
  }
}

QTable exact_q_dp(const Mdp& mdp, const Policy& policy, const RewardFn& reward, double tol) {
  return exact_q_dp(mdp, policy, reward_table(as_tabular(mdp), reward), tol);
}

double exact_value(const TabularMdp& mdp, const Policy& policy, const QTable& reward,
                   double tol) {
  if (const auto* mix = dynamic_cast<const MixturePolicy*>(&policy)) {
    double total = 0.0;
    for (const auto& c : mix->components()) total += exact_value(mdp, *c, reward, tol);
    return total / static_cast<double>(mix->components().size());
  }
  const QTable q = exact_q_dp(mdp, policy, reward, tol);
  const QTable pi = policy_table(policy, mdp.state_count());
  return state_values(q, pi)[static_cast<Eigen::Index>(mdp.start())];
}

QTable optimal_q_dp(const TabularMdp& mdp, const QTable& reward, double tol) {
  QTable q = QTable::Zero(mdp.state_count(), mdp.num_actions());
  for (;;) {
    const Eigen::VectorXd v = q.rowwise().maxCoeff();
    QTable next = reward + mdp.gamma() * expected_next(mdp, v);
    const double residual = (next - q).cwiseAbs().maxCoeff();
    q = std::move(next);
    if (residual <= tol) return q;
  }
}

double optimal_value(const TabularMdp& mdp, double tol) {
  const QTable q = optimal_q_dp(mdp, reward_table(mdp), tol);
  return q.row(static_cast<Eigen::Index>(mdp.start())).maxCoeff();
}

QTable exact_occupancy(const TabularMdp& mdp, const Policy& policy, double tol) {
  if (const auto* mix = dynamic_cast<const MixturePolicy*>(&policy)) {
    QTable total = QTable::Zero(mdp.state_count(), mdp.num_actions());
    for (const auto& c : mix->components()) total += exact_occupancy(mdp, *c, tol);
    return total / static_cast<double>(mix->components().size());
  }
  const std::size_t ns = mdp.state_count(), na = mdp.num_actions();
  const QTable pi = policy_table(policy, ns);
  QTable mu = QTable::Zero(ns, na);
  mu.row(static_cast<Eigen::Index>(mdp.start())) = pi.row(static_cast<Eigen::Index>(mdp.start()));
  QTable d = QTable::Zero(ns, na);
  double weight = 1.0 - mdp.gamma();
  while (weight > tol) {
    d += weight * mu;
    Eigen::VectorXd next_state = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(ns));
    for (std::size_t s = 0; s < ns; ++s)
      for (std::size_t a = 0; a < na; ++a) {
        const double m = mu(s, a);
        if (m == 0.0) continue;
        const auto& row = mdp.transitions()[s][a];
        for (std::size_t n = 0; n < ns; ++n) next_state[n] += m * row[n];
      }
    mu = pi.array().colwise() * next_state.array();
    weight *= mdp.gamma();
  }
  return d;
}

}  // namespace eniac
