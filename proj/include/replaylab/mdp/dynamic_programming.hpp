#pragma once

#include "replaylab/mdp/tabular_mdp.hpp"

#include <Eigen/Dense>

#include <cstdint>

namespace replaylab::mdp {

/// P_pi(s, s') = sum_a pi(a|s) T(s'|s, a).
Eigen::MatrixXd state_transition(const TabularMDP& mdp, const Policy& policy);

/// (1 - gamma) rho_init + gamma P_pi^T rho.
Eigen::VectorXd flow_operator(const TabularMDP& mdp, const Eigen::VectorXd& rho_init,
                              const Policy& policy, const Eigen::VectorXd& rho);

/// Normalized discounted state occupancy of `policy` started from
/// `rho_init`: the fixed point of flow_operator. Direct LU solve up to 2000
/// states, fixed-point iteration beyond.
Eigen::VectorXd occupancy_measure(const TabularMDP& mdp, const Eigen::VectorXd& rho_init,
                                  const Policy& policy);

/// Distribution of the state at trajectory step `step` (0 = rho_init).
Eigen::VectorXd state_distribution_at(const TabularMDP& mdp, const Eigen::VectorXd& rho_init,
                                      const Policy& policy, std::int64_t step);

Eigen::VectorXd exact_v(const TabularMDP& mdp, const Policy& policy);
/// Q^pi, solved exactly.
Eigen::MatrixXd exact_q(const TabularMDP& mdp, const Policy& policy);

/// r + gamma E_{s' ~ T, a' ~ pi} Q(s', a').
Eigen::MatrixXd bellman_apply(const TabularMDP& mdp, const Policy& policy, const Eigen::MatrixXd& q);

/// Expected discounted return from rho0.
double policy_return(const TabularMDP& mdp, const Policy& policy);

/// Greedy policy; ties share the mass equally.
Policy greedy_policy(const Eigen::MatrixXd& q);
/// pi(a|s) proportional to exp(Q(s, a) / temperature).
Policy softmax_policy(const Eigen::MatrixXd& q, double temperature);

struct PolicyIterationResult {
    Policy policy;
    Eigen::MatrixXd q;
    int iterations{0};
};

/// Classical policy iteration from the uniform policy.
PolicyIterationResult policy_iteration(const TabularMDP& mdp, int max_iterations = 1000);

}  // namespace replaylab::mdp
