#include "replaylab/mdp/empirical_errors.hpp"

#include "replaylab/errors.hpp"
#include "replaylab/mdp/dynamic_programming.hpp"
#include "replaylab/mdp/wasserstein.hpp"

#include <algorithm>
#include <cmath>

namespace replaylab::mdp {

double discounted_average(double gamma, std::span<const Trajectory> trajectories,
                          const Eigen::MatrixXd& f, std::int64_t step, std::int64_t horizon,
                          std::optional<std::span<const double>> weights) {
    if (trajectories.empty()) throw ParameterError("need at least one trajectory");
    if (weights && weights->size() != trajectories.size())
        throw ParameterError("need one weight per trajectory");
    if (step < 0) throw ParameterError("step must be >= 0");
    double weighted = 0.0;
    double weight_sum = 0.0;
    for (std::size_t e = 0; e < trajectories.size(); ++e) {
        const double w = weights ? (*weights)[e] : 1.0;
        if (!(w > 0.0) || !std::isfinite(w)) throw ParameterError("trajectory weights must be positive");
        const auto& traj = trajectories[e];
        const auto end = std::min<std::int64_t>(horizon, static_cast<std::int64_t>(traj.size()));
        double acc = 0.0;
        double discount = 1.0 - gamma;
        for (std::int64_t j = step; j < end; ++j) {
            const auto& tr = traj[static_cast<std::size_t>(j)];
            acc += discount * f(tr.state, tr.action);
            discount *= gamma;
        }
        weighted += w * acc;
        weight_sum += w;
    }
    return weighted / weight_sum;
}

EmpiricalErrors empirical_errors(const TabularMDP& mdp, std::span<const Trajectory> trajectories,
                                 const Eigen::MatrixXd& q_hat, const Policy& pi_n,
                                 const Policy& behavior, std::int64_t step, std::int64_t horizon,
                                 std::optional<std::span<const double>> weights) {
    EmpiricalErrors out;
    if (step >= horizon) {
        out.degenerate = true;
        return out;
    }
    if (q_hat.rows() != mdp.n_states || q_hat.cols() != mdp.n_actions || !q_hat.allFinite())
        throw ParameterError("Q table must be finite with one entry per state-action pair");
    for (const auto& traj : trajectories)
        if (static_cast<std::int64_t>(traj.size()) < step)
            throw ParameterError("trajectory shorter than the evaluation step");

    const Eigen::MatrixXd residual = (q_hat - bellman_apply(mdp, pi_n, q_hat)).cwiseAbs();
    const Eigen::VectorXd gap = policy_w1(mdp, pi_n, behavior);
    const Eigen::MatrixXd gap_table = gap.replicate(1, mdp.n_actions);
    out.bellman = discounted_average(mdp.gamma, trajectories, residual, step, horizon, weights);
    out.w1 = discounted_average(mdp.gamma, trajectories, gap_table, step, horizon, weights);
    return out;
}

}  // namespace replaylab::mdp
