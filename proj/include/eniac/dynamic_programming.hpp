#pragma once

#include <Eigen/Core>

#include "eniac/mdp.hpp"

namespace eniac {

/// |S| x |A| table.
using QTable = Eigen::MatrixXd;

/// Reward function materialized on a tabular MDP.
QTable reward_table(const TabularMdp& mdp, const RewardFn& reward);
QTable reward_table(const TabularMdp& mdp);

/// pi(a|s) for every discrete state; requires a Markov policy.
QTable policy_table(const Policy& policy, std::size_t num_states);

/// Value iteration on the policy Bellman operator until ||Q - T^pi Q||_inf <= tol.
/// Throws std::invalid_argument for non-tabular MDPs or non-Markov policies.
QTable exact_q_dp(const Mdp& mdp, const Policy& policy, const QTable& reward, double tol = 1e-10);
QTable exact_q_dp(const Mdp& mdp, const Policy& policy, const RewardFn& reward, double tol = 1e-10);

Eigen::VectorXd state_values(const QTable& q, const QTable& pi);
QTable advantages(const QTable& q, const QTable& pi);

/// V^pi(s0) under `reward`; trajectory-level mixtures average their components.
double exact_value(const TabularMdp& mdp, const Policy& policy, const QTable& reward,
                   double tol = 1e-10);

/// Q* by value iteration with the max operator.
QTable optimal_q_dp(const TabularMdp& mdp, const QTable& reward, double tol = 1e-10);
double optimal_value(const TabularMdp& mdp, double tol = 1e-10);

/// Discounted state-action occupancy d^pi_{s0} (s0 = the MDP's start state,
/// a0 ~ pi); mixtures average their components.
QTable exact_occupancy(const TabularMdp& mdp, const Policy& policy, double tol = 1e-12);

}  // namespace eniac
