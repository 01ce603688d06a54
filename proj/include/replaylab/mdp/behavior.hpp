#pragma once

#include "replaylab/mdp/tabular_mdp.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace replaylab::mdp {

/// Step-i behaviour of a sequence of episodes.
struct BehaviorMixture {
    /// Occupancy-weighted mixture of the episode policies.
    Policy policy;
    /// Weighted average of the episode state distributions at step i.
    Eigen::VectorXd state_dist;
    /// Weighted average of the per-episode occupancy measures started at step i.
    Eigen::VectorXd mixed_occupancy;
};

/// Per-episode occupancies rho^{pi^e}_{start_e}; callers that add episodes
/// one at a time can cache these and use mix_behavior directly.
std::vector<Eigen::VectorXd> episode_occupancies(const TabularMDP& mdp,
                                                 std::span<const Policy> policies,
                                                 std::span<const Eigen::VectorXd> start_dists);

/// Combines cached occupancies. `weights` defaults to equal weights; rows with
/// zero mixture mass are set uniform.
BehaviorMixture mix_behavior(const TabularMDP& mdp, std::span<const Policy> policies,
                             std::span<const Eigen::VectorXd> start_dists,
                             std::span<const Eigen::VectorXd> occupancies,
                             std::optional<std::span<const double>> weights = std::nullopt);

/// Behaviour policy and mixed step-i state distribution. `start_dists[e]`
/// is the state distribution of episode e at step i.
BehaviorMixture behavior_policy(const TabularMDP& mdp, std::span<const Policy> policies,
                                std::span<const Eigen::VectorXd> start_dists,
                                std::optional<std::span<const double>> weights = std::nullopt);

/// State distribution at step `step` for each episode policy, all started
/// from mdp.rho0.
std::vector<Eigen::VectorXd> step_distributions(const TabularMDP& mdp,
                                                std::span<const Policy> policies,
                                                std::int64_t step);

/// l1 gap between the averaged per-episode occupancies and the occupancy
/// generated by the mixture (state_dist, policy). Zero up to round-off.
double verify_flow_lemma(const TabularMDP& mdp, std::span<const Policy> policies,
                         std::span<const Eigen::VectorXd> start_dists,
                         std::optional<std::span<const double>> weights = std::nullopt);

/// Half the l1 distance.
double total_variation(const Eigen::VectorXd& p, const Eigen::VectorXd& q);

}  // namespace replaylab::mdp
