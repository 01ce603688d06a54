#include "replaylab/mdp/dynamic_programming.hpp"

#include "replaylab/errors.hpp"

#include <algorithm>
#include <cmath>

namespace replaylab::mdp {

namespace {

constexpr int kDirectSolveLimit = 2000;

Eigen::VectorXd expected_reward(const TabularMDP& mdp, const Policy& policy) {
    return mdp.reward.cwiseProduct(policy).rowwise().sum();
}

Eigen::VectorXd solve_discounted(const TabularMDP& mdp, const Eigen::MatrixXd& p,
                                 const Eigen::VectorXd& rhs) {
    const Eigen::Index n = p.rows();
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n) - mdp.gamma * p;
    Eigen::VectorXd x = a.partialPivLu().solve(rhs);
    if (!x.allFinite()) throw NumericalError("discounted linear system is singular");
    return x;
}

}  // namespace

Eigen::MatrixXd state_transition(const TabularMDP& mdp, const Policy& policy) {
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(mdp.n_states, mdp.n_states);
    for (int s = 0; s < mdp.n_states; ++s)
        for (int a = 0; a < mdp.n_actions; ++a)
            if (policy(s, a) != 0.0) p.row(s) += policy(s, a) * mdp.transition.row(mdp.row(s, a));
    return p;
}

Eigen::VectorXd flow_operator(const TabularMDP& mdp, const Eigen::VectorXd& rho_init,
                              const Policy& policy, const Eigen::VectorXd& rho) {
    return (1.0 - mdp.gamma) * rho_init + mdp.gamma * state_transition(mdp, policy).transpose() * rho;
}

Eigen::VectorXd occupancy_measure(const TabularMDP& mdp, const Eigen::VectorXd& rho_init,
                                  const Policy& policy) {
    validate_state_distribution(mdp, rho_init);
    validate_policy(mdp, policy);
    const Eigen::MatrixXd pt = state_transition(mdp, policy).transpose();
    if (mdp.n_states <= kDirectSolveLimit) {
        Eigen::VectorXd rho = solve_discounted(mdp, pt, (1.0 - mdp.gamma) * rho_init);
        return rho.cwiseMax(0.0);
    }
    // Contraction with modulus gamma in l1; stop once the step is negligible.
    Eigen::VectorXd rho = rho_init;
    for (int it = 0; it < 100000; ++it) {
        Eigen::VectorXd next = (1.0 - mdp.gamma) * rho_init + mdp.gamma * pt * rho;
        const double step = (next - rho).lpNorm<1>();
        rho.swap(next);
        if (step * mdp.gamma / (1.0 - mdp.gamma) < 1e-12) return rho;
    }
    throw NumericalError("occupancy fixed-point iteration did not converge");
}

Eigen::VectorXd state_distribution_at(const TabularMDP& mdp, const Eigen::VectorXd& rho_init,
                                      const Policy& policy, std::int64_t step) {
    if (step < 0) throw ParameterError("trajectory step must be >= 0");
    Eigen::VectorXd rho = rho_init;
    if (step == 0) return rho;
    const Eigen::MatrixXd pt = state_transition(mdp, policy).transpose();
    for (std::int64_t i = 0; i < step; ++i) rho = pt * rho;
    return rho;
}

Eigen::VectorXd exact_v(const TabularMDP& mdp, const Policy& policy) {
    validate_policy(mdp, policy);
    return solve_discounted(mdp, state_transition(mdp, policy), expected_reward(mdp, policy));
}

Eigen::MatrixXd exact_q(const TabularMDP& mdp, const Policy& policy) {
    const Eigen::VectorXd v = exact_v(mdp, policy);
    const Eigen::VectorXd tv = mdp.transition * v;
    Eigen::MatrixXd q = mdp.reward;
    for (int s = 0; s < mdp.n_states; ++s)
        for (int a = 0; a < mdp.n_actions; ++a) q(s, a) += mdp.gamma * tv[mdp.row(s, a)];
    return q;
}

Eigen::MatrixXd bellman_apply(const TabularMDP& mdp, const Policy& policy, const Eigen::MatrixXd& q) {
    if (!q.allFinite()) throw ParameterError("Q table must be finite");
    const Eigen::VectorXd next_value = q.cwiseProduct(policy).rowwise().sum();
    const Eigen::VectorXd tv = mdp.transition * next_value;
    Eigen::MatrixXd out = mdp.reward;
    for (int s = 0; s < mdp.n_states; ++s)
        for (int a = 0; a < mdp.n_actions; ++a) out(s, a) += mdp.gamma * tv[mdp.row(s, a)];
    return out;
}

double policy_return(const TabularMDP& mdp, const Policy& policy) {
    return mdp.rho0.dot(exact_v(mdp, policy));
}

Policy greedy_policy(const Eigen::MatrixXd& q) {
    Policy pi = Policy::Zero(q.rows(), q.cols());
    for (Eigen::Index s = 0; s < q.rows(); ++s) {
        const double best = q.row(s).maxCoeff();
        // Relative tie tolerance so that round-off does not break ties.
        const double tol = 1e-12 * std::max(1.0, std::abs(best));
        for (Eigen::Index a = 0; a < q.cols(); ++a)
            if (q(s, a) >= best - tol) pi(s, a) = 1.0;
        pi.row(s) /= pi.row(s).sum();
    }
    return pi;
}

Policy softmax_policy(const Eigen::MatrixXd& q, double temperature) {
    if (!(temperature > 0.0)) throw ParameterError("softmax temperature must be positive");
    Policy pi(q.rows(), q.cols());
    for (Eigen::Index s = 0; s < q.rows(); ++s) {
        const double best = q.row(s).maxCoeff();
        for (Eigen::Index a = 0; a < q.cols(); ++a) pi(s, a) = std::exp((q(s, a) - best) / temperature);
        pi.row(s) /= pi.row(s).sum();
    }
    return pi;
}

PolicyIterationResult policy_iteration(const TabularMDP& mdp, int max_iterations) {
    PolicyIterationResult out;
    out.policy = uniform_policy(mdp);
    for (out.iterations = 1; out.iterations <= max_iterations; ++out.iterations) {
        out.q = exact_q(mdp, out.policy);
        Policy next = greedy_policy(out.q);
        if ((next - out.policy).cwiseAbs().maxCoeff() < 1e-12) return out;
        out.policy = std::move(next);
    }
    throw NumericalError("policy iteration did not converge");
}

}  // namespace replaylab::mdp
