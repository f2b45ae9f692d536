#pragma once

// Shared fixtures and reference oracles for the test binaries. The oracles
// here are deliberately written without the library's solvers: Bellman
// equations are solved as dense linear systems.

#include <cmath>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "eniac/mdp.hpp"
#include "eniac/rng.hpp"

namespace fixtures {

using eniac::TabularMdp;

// 5-state chain: action 0 steps left, action 1 steps right (walls reflect).
// The right end pays 1, the left end a small 0.05 for staying put.
inline TabularMdp chain5(double gamma = 0.9) {
  const std::size_t n = 5;
  std::vector<std::vector<std::vector<double>>> p(
      n, std::vector<std::vector<double>>(2, std::vector<double>(n, 0.0)));
  std::vector<std::vector<double>> r(n, std::vector<double>(2, 0.0));
  for (std::size_t s = 0; s < n; ++s) {
    p[s][0][s == 0 ? 0 : s - 1] = 1.0;
    p[s][1][s == n - 1 ? n - 1 : s + 1] = 1.0;
  }
  r[0][0] = 0.05;
  r[n - 1][0] = r[n - 1][1] = 1.0;
  return TabularMdp(p, r, gamma, 0);
}

inline TabularMdp random_mdp(eniac::Rng& rng, std::size_t n, std::size_t na, double gamma) {
  std::vector<std::vector<std::vector<double>>> p(
      n, std::vector<std::vector<double>>(na, std::vector<double>(n, 0.0)));
  std::vector<std::vector<double>> r(n, std::vector<double>(na, 0.0));
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t a = 0; a < na; ++a) {
      double total = 0.0;
      for (std::size_t t = 0; t < n; ++t) total += (p[s][a][t] = rng.uniform() + 0.05);
      for (std::size_t t = 0; t < n; ++t) p[s][a][t] /= total;
      r[s][a] = rng.uniform();
    }
  return TabularMdp(p, r, gamma, 0);
}

inline std::vector<std::vector<double>> random_policy_table(eniac::Rng& rng, std::size_t n,
                                                            std::size_t na) {
  std::vector<std::vector<double>> t(n, std::vector<double>(na));
  for (auto& row : t) {
    double total = 0.0;
    for (double& x : row) total += (x = rng.uniform() + 0.1);
    for (double& x : row) x /= total;
  }
  return t;
}

// Q^pi from (I - gamma P_pi) q = r over state-action pairs.
inline Eigen::MatrixXd solve_q(const TabularMdp& m, const std::vector<std::vector<double>>& pi,
                               const Eigen::MatrixXd& reward) {
  const std::size_t n = m.state_count(), na = m.num_actions();
  const auto N = static_cast<Eigen::Index>(n * na);
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(N, N);
  Eigen::VectorXd b(N);
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t a = 0; a < na; ++a) {
      const auto i = static_cast<Eigen::Index>(s * na + a);
      b[i] = reward(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(a));
      for (std::size_t t = 0; t < n; ++t)
        for (std::size_t c = 0; c < na; ++c)
          A(i, static_cast<Eigen::Index>(t * na + c)) -= m.gamma() * m.probability(s, a, t) * pi[t][c];
    }
  const Eigen::VectorXd q = A.fullPivLu().solve(b);
  Eigen::MatrixXd out(n, na);
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t a = 0; a < na; ++a)
      out(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(a)) =
          q[static_cast<Eigen::Index>(s * na + a)];
  return out;
}

inline Eigen::MatrixXd own_reward(const TabularMdp& m) {
  Eigen::MatrixXd r(m.state_count(), m.num_actions());
  for (std::size_t s = 0; s < m.state_count(); ++s)
    for (std::size_t a = 0; a < m.num_actions(); ++a)
      r(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(a)) = m.reward_at(s, a);
  return r;
}

inline double value_at_start(const TabularMdp& m, const std::vector<std::vector<double>>& pi) {
  const Eigen::MatrixXd q = solve_q(m, pi, own_reward(m));
  double v = 0.0;
  for (std::size_t a = 0; a < m.num_actions(); ++a)
    v += pi[m.start()][a] * q(static_cast<Eigen::Index>(m.start()), static_cast<Eigen::Index>(a));
  return v;
}

inline std::vector<std::vector<double>> uniform_table(std::size_t n, std::size_t na) {
  return std::vector<std::vector<double>>(n, std::vector<double>(na, 1.0 / static_cast<double>(na)));
}

}  // namespace fixtures
