#pragma once

#include "replaylab/mdp/tabular_mdp.hpp"
#include "replaylab/replay/transition.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace replaylab::mdp {

using Trajectory = std::vector<replay::Transition>;

/// (1 / sum w) sum_e w_e sum_{j=step}^{horizon-1} (1 - gamma) gamma^(j - step) f(s_j^e, a_j^e)
/// with f given as a state x action table. Steps past the end of a
/// trajectory contribute nothing. Equal weights when `weights` is absent.
double discounted_average(double gamma, std::span<const Trajectory> trajectories,
                          const Eigen::MatrixXd& f, std::int64_t step, std::int64_t horizon,
                          std::optional<std::span<const double>> weights = std::nullopt);

struct EmpiricalErrors {
    double bellman{0.0};   // eps_Q
    double w1{0.0};        // policy mismatch
    /// step >= horizon: the averaging range is empty and both values are 0.
    bool degenerate{false};
};

/// Bellman error of q_hat under pi_n and the W1 gap between pi_n and the
/// step-`step` behaviour policy, both averaged over the stored trajectories.
EmpiricalErrors empirical_errors(const TabularMDP& mdp, std::span<const Trajectory> trajectories,
                                 const Eigen::MatrixXd& q_hat, const Policy& pi_n,
                                 const Policy& behavior, std::int64_t step, std::int64_t horizon,
                                 std::optional<std::span<const double>> weights = std::nullopt);

}  // namespace replaylab::mdp
