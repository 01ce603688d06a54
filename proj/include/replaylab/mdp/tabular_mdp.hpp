#pragma once

#include <Eigen/Dense>

#include <random>
#include <vector>

namespace replaylab::mdp {

/// pi(a|s) as an n_states x n_actions row-stochastic matrix.
using Policy = Eigen::MatrixXd;

/**
 * Finite MDP whose actions carry a real coordinate; the coordinate defines
 * the ground metric |x_a - x_b| for Wasserstein distances between policies.
 *
 * transition has one row per (s, a) pair, at index s * n_actions + a, holding
 * the next-state distribution.
 */
struct TabularMDP {
    int n_states{0};
    int n_actions{0};
    Eigen::MatrixXd transition;
    Eigen::MatrixXd reward;   // n_states x n_actions
    double gamma{0.9};
    Eigen::VectorXd rho0;
    std::vector<double> action_coords;
    double r_max{1.0};

    Eigen::Index row(int state, int action) const {
        return static_cast<Eigen::Index>(state) * n_actions + action;
    }

    /// Throws ParameterError when shapes, distributions or rewards are invalid.
    void validate() const;
    /// Spread of the action coordinates.
    double action_diameter() const;
};

Policy uniform_policy(const TabularMDP& mdp);

/// Throws ParameterError unless `policy` is a row-stochastic matrix of the
/// right shape.
void validate_policy(const TabularMDP& mdp, const Policy& policy);

/// Throws ParameterError unless `dist` is a distribution over the states.
void validate_state_distribution(const TabularMDP& mdp, const Eigen::VectorXd& dist);

/// Index drawn from `probs` by inverse CDF on one unit_uniform draw.
int sample_categorical(const Eigen::Ref<const Eigen::VectorXd>& probs, std::mt19937_64& rng);

}  // namespace replaylab::mdp
