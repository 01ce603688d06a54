#include "replaylab/mdp/tabular_mdp.hpp"

#include "replaylab/errors.hpp"
#include "replaylab/replay/replay_buffer.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace replaylab::mdp {

namespace {

constexpr double kSumTol = 1e-12;

bool is_distribution(const Eigen::Ref<const Eigen::VectorXd>& v, double tol) {
    if (!v.allFinite() || (v.array() < 0.0).any()) return false;
    return std::abs(v.sum() - 1.0) <= tol * std::max<double>(1.0, static_cast<double>(v.size()));
}

}  // namespace

void TabularMDP::validate() const {
    if (n_states < 1 || n_actions < 1) throw ParameterError("MDP needs at least one state and action");
    if (!(gamma >= 0.0 && gamma < 1.0)) throw ParameterError("gamma must lie in [0, 1)");
    if (!(r_max > 0.0) || !std::isfinite(r_max)) throw ParameterError("r_max must be positive");
    if (transition.rows() != static_cast<Eigen::Index>(n_states) * n_actions ||
        transition.cols() != n_states)
        throw ParameterError("transition table has the wrong shape");
    if (reward.rows() != n_states || reward.cols() != n_actions)
        throw ParameterError("reward table has the wrong shape");
    if (static_cast<int>(action_coords.size()) != n_actions)
        throw ParameterError("need one coordinate per action");
    for (Eigen::Index r = 0; r < transition.rows(); ++r)
        if (!is_distribution(transition.row(r).transpose(), kSumTol))
            throw ParameterError(fmt::format("transition row {} (state {}, action {}) is not a distribution",
                                             r, r / n_actions, r % n_actions));
    if (!reward.allFinite() || (reward.array() < 0.0).any() || (reward.array() > r_max).any())
        throw ParameterError(fmt::format("rewards must lie in [0, {}]", r_max));
    validate_state_distribution(*this, rho0);
    for (double x : action_coords)
        if (!std::isfinite(x)) throw ParameterError("action coordinates must be finite");
}

double TabularMDP::action_diameter() const {
    if (action_coords.empty()) return 0.0;
    const auto [lo, hi] = std::minmax_element(action_coords.begin(), action_coords.end());
    return *hi - *lo;
}

Policy uniform_policy(const TabularMDP& mdp) {
    return Policy::Constant(mdp.n_states, mdp.n_actions, 1.0 / mdp.n_actions);
}

void validate_policy(const TabularMDP& mdp, const Policy& policy) {
    if (policy.rows() != mdp.n_states || policy.cols() != mdp.n_actions)
        throw ParameterError("policy has the wrong shape");
    for (Eigen::Index s = 0; s < policy.rows(); ++s)
        if (!is_distribution(policy.row(s).transpose(), kSumTol))
            throw ParameterError(fmt::format("policy row {} is not a distribution", s));
}

void validate_state_distribution(const TabularMDP& mdp, const Eigen::VectorXd& dist) {
    if (dist.size() != mdp.n_states) throw ParameterError("state distribution has the wrong size");
    if (!is_distribution(dist, kSumTol)) throw ParameterError("state distribution must sum to 1");
}

int sample_categorical(const Eigen::Ref<const Eigen::VectorXd>& probs, std::mt19937_64& rng) {
    const double u = replay::unit_uniform(rng) * probs.sum();
    double acc = 0.0;
    int last_positive = 0;
    for (Eigen::Index i = 0; i < probs.size(); ++i) {
        if (probs[i] <= 0.0) continue;
        last_positive = static_cast<int>(i);
        acc += probs[i];
        if (u < acc) return static_cast<int>(i);
    }
    return last_positive;
}

}  // namespace replaylab::mdp
