#include "replaylab/mdp/behavior.hpp"

#include "replaylab/errors.hpp"
#include "replaylab/mdp/dynamic_programming.hpp"

#include <cmath>

namespace replaylab::mdp {

namespace {

std::vector<double> resolve_weights(std::size_t n, std::optional<std::span<const double>> weights) {
    if (!weights) return std::vector<double>(n, 1.0);
    if (weights->size() != n) throw ParameterError("need one weight per episode");
    for (double w : *weights)
        if (!(w > 0.0) || !std::isfinite(w)) throw ParameterError("episode weights must be positive");
    return {weights->begin(), weights->end()};
}

void check_episodes(std::span<const Policy> policies, std::span<const Eigen::VectorXd> start_dists) {
    if (policies.empty()) throw ParameterError("need at least one episode");
    if (policies.size() != start_dists.size())
        throw ParameterError("need one start distribution per episode policy");
}

}  // namespace

std::vector<Eigen::VectorXd> episode_occupancies(const TabularMDP& mdp,
                                                 std::span<const Policy> policies,
                                                 std::span<const Eigen::VectorXd> start_dists) {
    check_episodes(policies, start_dists);
    std::vector<Eigen::VectorXd> out;
    out.reserve(policies.size());
    for (std::size_t e = 0; e < policies.size(); ++e)
        out.push_back(occupancy_measure(mdp, start_dists[e], policies[e]));
    return out;
}

BehaviorMixture mix_behavior(const TabularMDP& mdp, std::span<const Policy> policies,
                             std::span<const Eigen::VectorXd> start_dists,
                             std::span<const Eigen::VectorXd> occupancies,
                             std::optional<std::span<const double>> weights) {
    check_episodes(policies, start_dists);
    if (occupancies.size() != policies.size()) throw ParameterError("need one occupancy per episode");
    const auto w = resolve_weights(policies.size(), weights);
    double total = 0.0;
    for (double x : w) total += x;

    Eigen::MatrixXd numer = Eigen::MatrixXd::Zero(mdp.n_states, mdp.n_actions);
    BehaviorMixture out;
    out.state_dist = Eigen::VectorXd::Zero(mdp.n_states);
    out.mixed_occupancy = Eigen::VectorXd::Zero(mdp.n_states);
    for (std::size_t e = 0; e < policies.size(); ++e) {
        const double we = w[e] / total;
        numer += we * (occupancies[e].asDiagonal() * policies[e]);
        out.mixed_occupancy += we * occupancies[e];
        out.state_dist += we * start_dists[e];
    }
    out.policy.resize(mdp.n_states, mdp.n_actions);
    for (int s = 0; s < mdp.n_states; ++s) {
        const double denom = out.mixed_occupancy[s];
        if (denom > 0.0)
            out.policy.row(s) = numer.row(s) / numer.row(s).sum();
        else
            out.policy.row(s).setConstant(1.0 / mdp.n_actions);
    }
    return out;
}

BehaviorMixture behavior_policy(const TabularMDP& mdp, std::span<const Policy> policies,
                                std::span<const Eigen::VectorXd> start_dists,
                                std::optional<std::span<const double>> weights) {
    const auto occ = episode_occupancies(mdp, policies, start_dists);
    return mix_behavior(mdp, policies, start_dists, occ, weights);
}

std::vector<Eigen::VectorXd> step_distributions(const TabularMDP& mdp,
                                                std::span<const Policy> policies,
                                                std::int64_t step) {
    std::vector<Eigen::VectorXd> out;
    out.reserve(policies.size());
    for (const auto& pi : policies) out.push_back(state_distribution_at(mdp, mdp.rho0, pi, step));
    return out;
}

double verify_flow_lemma(const TabularMDP& mdp, std::span<const Policy> policies,
                         std::span<const Eigen::VectorXd> start_dists,
                         std::optional<std::span<const double>> weights) {
    const auto mix = behavior_policy(mdp, policies, start_dists, weights);
    const Eigen::VectorXd generated = occupancy_measure(mdp, mix.state_dist, mix.policy);
    return (mix.mixed_occupancy - generated).lpNorm<1>();
}

double total_variation(const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
    if (p.size() != q.size()) throw ParameterError("distributions differ in size");
    return 0.5 * (p - q).lpNorm<1>();
}

}  // namespace replaylab::mdp
