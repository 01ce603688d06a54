#pragma once

#include "replaylab/mdp/tabular_mdp.hpp"

#include <Eigen/Dense>

#include <span>

namespace replaylab::mdp {

/// Exact 1-Wasserstein distance under |x - y| between two distributions on
/// the same real support, as the area between their CDFs. Throws
/// ParameterError when sizes differ or masses disagree.
double w1_distance(std::span<const double> p, std::span<const double> q,
                   std::span<const double> coords);

/// W1(pi1(.|s), pi2(.|s)) for every state.
Eigen::VectorXd policy_w1(const TabularMDP& mdp, const Policy& pi1, const Policy& pi2);

/// Same distance computed as a min-cost transportation problem by successive
/// shortest paths. Independent of the CDF formula; intended for checking it
/// on small supports.
double transport_lp_w1(std::span<const double> p, std::span<const double> q,
                       std::span<const double> coords);

}  // namespace replaylab::mdp
