#include "replaylab/errors.hpp"
#include "replaylab/mdp/behavior.hpp"
#include "replaylab/mdp/dynamic_programming.hpp"
#include "replaylab/mdp/empirical_errors.hpp"
#include "replaylab/mdp/environments.hpp"
#include "replaylab/mdp/tabular_mdp.hpp"
#include "replaylab/mdp/wasserstein.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <random>
#include <sstream>

using namespace replaylab;
using namespace replaylab::mdp;

namespace {

TabularMDP blank(int ns, int na, double gamma) {
    TabularMDP m;
    m.n_states = ns;
    m.n_actions = na;
    m.gamma = gamma;
    m.transition = Eigen::MatrixXd::Zero(ns * na, ns);
    m.reward = Eigen::MatrixXd::Zero(ns, na);
    m.rho0 = Eigen::VectorXd::Zero(ns);
    m.rho0(0) = 1.0;
    for (int a = 0; a < na; ++a) m.action_coords.push_back(na == 1 ? 0.0 : double(a) / (na - 1));
    return m;
}

TabularMDP two_state_cycle(double gamma) {
    auto m = blank(2, 1, gamma);
    m.transition(m.row(0, 0), 1) = 1.0;
    m.transition(m.row(1, 0), 0) = 1.0;
    return m;
}

/// Three states in a line; action 0 stays, action 1 moves right, the last
/// state is absorbing.
TabularMDP three_chain() {
    auto m = blank(3, 2, 0.8);
    for (int s = 0; s < 3; ++s) {
        m.transition(m.row(s, 0), s) = 1.0;
        m.transition(m.row(s, 1), std::min(s + 1, 2)) = 1.0;
    }
    m.reward(2, 0) = m.reward(2, 1) = 1.0;
    return m;
}

Policy random_policy(const TabularMDP& m, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.01, 1.0);
    Policy p(m.n_states, m.n_actions);
    for (int s = 0; s < m.n_states; ++s) {
        for (int a = 0; a < m.n_actions; ++a) p(s, a) = u(rng);
        p.row(s) /= p.row(s).sum();
    }
    return p;
}

Eigen::VectorXd random_dist(int n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Eigen::VectorXd d(n);
    for (int i = 0; i < n; ++i) d(i) = u(rng);
    return d / d.sum();
}

replay::Transition step(int s, int a, double r, int s2) {
    replay::Transition t;
    t.state = s;
    t.action = a;
    t.reward = r;
    t.next_state = s2;
    return t;
}

}  // namespace

TEST(Occupancy, AbsorbingState) {
    auto m = blank(1, 1, 0.9);
    m.transition(0, 0) = 1.0;
    const auto rho = occupancy_measure(m, m.rho0, uniform_policy(m));
    EXPECT_NEAR(rho(0), 1.0, 1e-15);
}

TEST(Occupancy, TwoStateCycle) {
    for (double g : {0.5, 0.9, 0.99}) {
        const auto m = two_state_cycle(g);
        const auto rho = occupancy_measure(m, m.rho0, uniform_policy(m));
        EXPECT_NEAR(rho(0), 1.0 / (1.0 + g), 1e-12);
        EXPECT_NEAR(rho(1), g / (1.0 + g), 1e-12);
    }
}

TEST(Occupancy, IsAFixedPointDistribution) {
    std::mt19937_64 rng(3);
    for (int k = 0; k < 20; ++k) {
        const auto m = random_mdp(7, 3, 0.95, 100 + k);
        const auto pi = random_policy(m, rng);
        const auto init = random_dist(7, rng);
        const auto rho = occupancy_measure(m, init, pi);
        EXPECT_NEAR(rho.sum(), 1.0, 1e-12);
        EXPECT_GE(rho.minCoeff(), 0.0);
        EXPECT_LE((rho - flow_operator(m, init, pi, rho)).lpNorm<1>(), 1e-10);
    }
}

TEST(ExactQ, SingleState) {
    auto m = blank(1, 1, 0.9);
    m.transition(0, 0) = 1.0;
    m.reward(0, 0) = 1.0;
    EXPECT_NEAR(exact_q(m, uniform_policy(m))(0, 0), 10.0, 1e-12);
}

TEST(ExactQ, ZeroReward) {
    auto m = random_mdp(5, 2, 0.9, 1);
    m.reward.setZero();
    EXPECT_LE(exact_q(m, uniform_policy(m)).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(ExactQ, BellmanFixedPointAndRange) {
    std::mt19937_64 rng(8);
    for (int k = 0; k < 10; ++k) {
        const auto m = random_mdp(5, 3, 0.9, 40 + k);
        const auto pi = random_policy(m, rng);
        const auto q = exact_q(m, pi);
        EXPECT_LE((bellman_apply(m, pi, q) - q).cwiseAbs().maxCoeff(), 1e-10);
        EXPECT_GE(q.minCoeff(), 0.0);
        EXPECT_LE(q.maxCoeff(), m.r_max / (1.0 - m.gamma) + 1e-12);
    }
}

TEST(BellmanApply, Examples) {
    auto m = random_mdp(4, 2, 0.7, 9);
    const auto pi = uniform_policy(m);
    EXPECT_LE((bellman_apply(m, pi, Eigen::MatrixXd::Zero(4, 2)) - m.reward).cwiseAbs().maxCoeff(), 0.0);
    m.gamma = 0.0;
    EXPECT_LE((bellman_apply(m, pi, Eigen::MatrixXd::Constant(4, 2, 55.0)) - m.reward).cwiseAbs().maxCoeff(), 0.0);
}

TEST(PolicyIteration, FindsTheBestReturn) {
    const auto m = chain_environment();
    const auto pi = policy_iteration(m);
    const double best = policy_return(m, pi.policy);
    std::mt19937_64 rng(2);
    for (int k = 0; k < 50; ++k) EXPECT_LE(policy_return(m, random_policy(m, rng)), best + 1e-12);
    EXPECT_LE((bellman_apply(m, pi.policy, pi.q) - pi.q).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Policies, GreedyAndSoftmax) {
    Eigen::MatrixXd q(2, 3);
    q << 1, 3, 3, 0, 0, 0;
    const auto g = greedy_policy(q);
    EXPECT_DOUBLE_EQ(g(0, 1), 0.5);
    EXPECT_DOUBLE_EQ(g(0, 0), 0.0);
    EXPECT_DOUBLE_EQ(g(1, 2), 1.0 / 3.0);
    const auto s = softmax_policy(q, 1.0);
    EXPECT_NEAR(s(0, 0), 1.0 / (1.0 + 2.0 * std::exp(2.0)), 1e-15);
    const auto cold = softmax_policy(q * 1e3, 1e-3);
    EXPECT_NEAR(cold(0, 1), 0.5, 1e-12);
    EXPECT_THROW(softmax_policy(q, 0.0), ParameterError);
}

TEST(Behavior, SingleEpisodeIsItsPolicy) {
    std::mt19937_64 rng(4);
    const auto m = random_mdp(6, 3, 0.9, 77);
    const std::vector<Policy> pols{random_policy(m, rng)};
    const std::vector<Eigen::VectorXd> starts{m.rho0};
    const auto mix = behavior_policy(m, pols, starts);
    EXPECT_LE((mix.policy - pols[0]).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE((mix.state_dist - m.rho0).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_LE(verify_flow_lemma(m, pols, starts), 1e-10);
}

TEST(Behavior, IdenticalPoliciesOnReachableStates) {
    const auto m = three_chain();
    Policy pi(3, 2);
    pi << 0.3, 0.7, 0.6, 0.4, 0.5, 0.5;
    const std::vector<Policy> pols(3, pi);
    const auto starts = step_distributions(m, pols, 0);
    const auto mix = behavior_policy(m, pols, starts);
    EXPECT_LE((mix.policy - pi).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Behavior, UnreachableRowsAreUniform) {
    const auto m = three_chain();
    Policy stay(3, 2);
    stay << 1, 0, 1, 0, 1, 0;
    const std::vector<Policy> pols{stay};
    const std::vector<Eigen::VectorXd> starts{m.rho0};
    const auto mix = behavior_policy(m, pols, starts);
    EXPECT_DOUBLE_EQ(mix.policy(0, 0), 1.0);
    EXPECT_DOUBLE_EQ(mix.policy(2, 0), 0.5);
    EXPECT_DOUBLE_EQ(mix.policy(2, 1), 0.5);
}

TEST(Behavior, TwoEpisodesMatchBruteForceMixture) {
    const auto m = three_chain();
    Policy p1(3, 2), p2(3, 2);
    p1 << 0.9, 0.1, 0.8, 0.2, 0.5, 0.5;
    p2 << 0.2, 0.8, 0.3, 0.7, 0.1, 0.9;
    const std::vector<Policy> pols{p1, p2};
    for (std::int64_t i : {0, 1, 3}) {
        const auto starts = step_distributions(m, pols, i);
        // Occupancies by summing discounted step distributions directly.
        std::vector<Eigen::VectorXd> occ;
        for (int e = 0; e < 2; ++e) {
            Eigen::VectorXd d = starts[static_cast<std::size_t>(e)], acc = Eigen::VectorXd::Zero(3);
            double disc = 1.0 - m.gamma;
            for (int t = 0; t < 400; ++t) {
                acc += disc * d;
                Eigen::VectorXd next = Eigen::VectorXd::Zero(3);
                for (int s = 0; s < 3; ++s)
                    for (int a = 0; a < 2; ++a) next += d(s) * pols[static_cast<std::size_t>(e)](s, a) * m.transition.row(m.row(s, a)).transpose();
                d = next;
                disc *= m.gamma;
            }
            occ.push_back(acc);
        }
        const auto mix = behavior_policy(m, pols, starts);
        for (int s = 0; s < 3; ++s) {
            const double den = occ[0](s) + occ[1](s);
            for (int a = 0; a < 2; ++a)
                EXPECT_NEAR(mix.policy(s, a), (p1(s, a) * occ[0](s) + p2(s, a) * occ[1](s)) / den, 1e-10);
            EXPECT_NEAR(mix.state_dist(s), 0.5 * (starts[0](s) + starts[1](s)), 1e-15);
        }
    }
}

TEST(Behavior, WeightedMixture) {
    const auto m = three_chain();
    Policy p1(3, 2), p2(3, 2);
    p1 << 1, 0, 1, 0, 1, 0;
    p2 << 0, 1, 0, 1, 0, 1;
    const std::vector<Policy> pols{p1, p2};
    const std::vector<Eigen::VectorXd> starts{m.rho0, m.rho0};
    const std::vector<double> w{3.0, 1.0};
    const auto mix = behavior_policy(m, pols, starts, std::span<const double>(w));
    // At state 0 the first occupancy is 1 and the second 1 - gamma.
    const double o2 = 1.0 - m.gamma;
    EXPECT_NEAR(mix.policy(0, 0), 3.0 / (3.0 + o2), 1e-12);
}

TEST(FlowLemma, RandomInstances) {
    std::mt19937_64 rng(10);
    for (int k = 0; k < 20; ++k) {
        const auto m = random_mdp(6, 3, 0.9, 500 + k);
        std::vector<Policy> pols;
        std::vector<Eigen::VectorXd> starts;
        std::vector<double> w;
        for (int e = 0; e < 4; ++e) {
            pols.push_back(random_policy(m, rng));
            starts.push_back(random_dist(6, rng));
            w.push_back(0.1 + e * 0.7);
        }
        EXPECT_LE(verify_flow_lemma(m, pols, starts), 1e-8);
        EXPECT_LE(verify_flow_lemma(m, pols, starts, std::span<const double>(w)), 1e-8);
    }
}

TEST(FlowOperator, ContractsInTotalVariation) {
    std::mt19937_64 rng(12);
    const auto m = random_mdp(6, 3, 0.85, 3);
    const auto pi = random_policy(m, rng);
    const auto init = random_dist(6, rng);
    for (int k = 0; k < 100; ++k) {
        const auto a = random_dist(6, rng), b = random_dist(6, rng);
        EXPECT_LE(total_variation(flow_operator(m, init, pi, a), flow_operator(m, init, pi, b)),
                  m.gamma * total_variation(a, b) + 1e-15);
    }
}

TEST(Wasserstein, Examples) {
    const std::vector<double> c{0.0, 1.0};
    const std::vector<double> p{0.5, 0.5}, d0{1.0, 0.0}, d1{0.0, 1.0};
    EXPECT_EQ(w1_distance(p, p, c), 0.0);
    EXPECT_DOUBLE_EQ(w1_distance(d0, d1, c), 1.0);
    EXPECT_DOUBLE_EQ(w1_distance(p, d0, c), 0.5);
    EXPECT_NEAR(transport_lp_w1(p, d0, c), 0.5, 1e-12);
    EXPECT_NEAR(transport_lp_w1(d0, d1, c), 1.0, 1e-12);
}

TEST(Wasserstein, UnsortedCoordinates) {
    const std::vector<double> c{2.0, -1.0, 0.5};
    const std::vector<double> p{0.2, 0.3, 0.5}, q{0.6, 0.1, 0.3};
    EXPECT_NEAR(w1_distance(p, q, c), transport_lp_w1(p, q, c), 1e-12);
}

TEST(Wasserstein, MetricAxiomsAndLp) {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int k = 0; k < 200; ++k) {
        const int n = 2 + k % 7;
        std::vector<double> c(static_cast<std::size_t>(n));
        for (auto& x : c) x = u(rng);
        auto draw = [&] {
            const auto d = random_dist(n, rng);
            return std::vector<double>(d.data(), d.data() + n);
        };
        const auto p = draw(), q = draw(), r = draw();
        const double pq = w1_distance(p, q, c);
        EXPECT_NEAR(pq, w1_distance(q, p, c), 1e-12);
        EXPECT_LE(w1_distance(p, p, c), 1e-12);
        EXPECT_LE(w1_distance(p, r, c), pq + w1_distance(q, r, c) + 1e-12);
        EXPECT_NEAR(pq, transport_lp_w1(p, q, c), 1e-9);
    }
}

TEST(Wasserstein, RejectsMismatchedSupports) {
    const std::vector<double> c{0.0, 1.0};
    EXPECT_THROW(w1_distance(std::vector<double>{1.0}, std::vector<double>{0.5, 0.5}, c), ParameterError);
    EXPECT_THROW(w1_distance(std::vector<double>{1.0, 0.0}, std::vector<double>{0.5, 0.4}, c), ParameterError);
}

TEST(Wasserstein, BoundsLipschitzDifferences) {
    std::mt19937_64 rng(31);
    const auto m = chain_environment();
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int k = 0; k < 50; ++k) {
        // Cumulative steps of slope at most 1 keep Q 1-Lipschitz over the coordinates.
        Eigen::MatrixXd q(m.n_states, m.n_actions);
        for (int s = 0; s < m.n_states; ++s) {
            q(s, 0) = u(rng);
            for (int a = 1; a < m.n_actions; ++a)
                q(s, a) = q(s, a - 1) + u(rng) * (m.action_coords[a] - m.action_coords[a - 1]);
        }
        const auto p1 = random_policy(m, rng), p2 = random_policy(m, rng);
        const auto w = policy_w1(m, p1, p2);
        for (int s = 0; s < m.n_states; ++s)
            EXPECT_LE(std::abs(p1.row(s).dot(q.row(s)) - p2.row(s).dot(q.row(s))), w(s) + 1e-12);
    }
}

TEST(EmpiricalErrors, ExactQHasNoBellmanError) {
    const auto m = chain_environment();
    std::mt19937_64 rng(5);
    const auto pi = random_policy(m, rng);
    const auto q = exact_q(m, pi);
    std::vector<Trajectory> trajs(2);
    for (int j = 0; j < 10; ++j) {
        trajs[0].push_back(step(j % 8, j % 4, 0.0, (j + 1) % 8));
        trajs[1].push_back(step((j * 3) % 8, (j + 1) % 4, 0.0, 0));
    }
    const auto err = empirical_errors(m, trajs, q, pi, pi, 0, 10);
    EXPECT_LE(err.bellman, 1e-10);
    EXPECT_EQ(err.w1, 0.0);
    EXPECT_FALSE(err.degenerate);
}

TEST(EmpiricalErrors, MatchesDirectSummation) {
    const auto m = three_chain();
    Eigen::MatrixXd q(3, 2);
    q << 0.5, 1.0, 2.0, 0.0, 4.0, 3.0;
    Policy pi(3, 2), beh(3, 2);
    pi << 0.5, 0.5, 1, 0, 0.2, 0.8;
    beh << 1, 0, 0.5, 0.5, 0.2, 0.8;
    const std::vector<Trajectory> trajs{
        {step(0, 1, 0.0, 1), step(1, 1, 0.0, 2), step(2, 0, 1.0, 2), step(2, 1, 1.0, 2)},
        {step(0, 0, 0.0, 0), step(0, 1, 0.0, 1), step(1, 0, 0.0, 1)}};
    const auto bq = bellman_apply(m, pi, q);
    const auto w = policy_w1(m, pi, beh);
    const std::vector<double> ew{2.0, 1.0};
    for (bool weighted : {false, true}) {
        for (std::int64_t i : {0, 1}) {
            const std::int64_t horizon = 3;
            double be = 0.0, wd = 0.0, wsum = 0.0;
            for (std::size_t e = 0; e < trajs.size(); ++e) {
                const double we = weighted ? ew[e] : 1.0;
                wsum += we;
                for (std::int64_t j = i; j < horizon && j < static_cast<std::int64_t>(trajs[e].size()); ++j) {
                    const auto& t = trajs[e][static_cast<std::size_t>(j)];
                    const double f = (1.0 - m.gamma) * std::pow(m.gamma, double(j - i)) * we;
                    be += f * std::abs(q(t.state, t.action) - bq(t.state, t.action));
                    wd += f * w(t.state);
                }
            }
            std::optional<std::span<const double>> opt;
            if (weighted) opt = std::span<const double>(ew);
            const auto err = empirical_errors(m, trajs, q, pi, beh, i, horizon, opt);
            EXPECT_NEAR(err.bellman, be / wsum, 1e-14);
            EXPECT_NEAR(err.w1, wd / wsum, 1e-14);
        }
    }
}

TEST(EmpiricalErrors, EmptyRangeIsDegenerate) {
    const auto m = three_chain();
    const std::vector<Trajectory> trajs{{step(0, 0, 0.0, 0)}};
    const auto pi = uniform_policy(m);
    const auto err = empirical_errors(m, trajs, Eigen::MatrixXd::Ones(3, 2), pi, pi, 5, 5);
    EXPECT_TRUE(err.degenerate);
    EXPECT_EQ(err.bellman, 0.0);
    EXPECT_EQ(err.w1, 0.0);
}

TEST(Environments, BuiltInsAreValid) {
    for (const auto& m : {chain_environment(), gridworld_environment()}) {
        EXPECT_NO_THROW(m.validate());
        EXPECT_DOUBLE_EQ(m.action_diameter(), 1.0);
        EXPECT_DOUBLE_EQ(m.gamma, 0.9);
    }
    EXPECT_EQ(chain_environment().n_states, 8);
    EXPECT_EQ(gridworld_environment().n_states, 25);
    EXPECT_EQ(environment_by_name("grid").n_states, 25);
    EXPECT_THROW(environment_by_name("no-such-env"), ParameterError);
}

TEST(Environments, TextRoundTrip) {
    const auto m = random_mdp(4, 3, 0.8, 17);
    const auto path = std::filesystem::temp_directory_path() / "replaylab_env_roundtrip.txt";
    save_environment(m, path);
    const auto back = environment_by_name(path.string());
    std::filesystem::remove(path);
    EXPECT_EQ(back.n_states, 4);
    EXPECT_EQ(back.n_actions, 3);
    EXPECT_EQ(back.gamma, m.gamma);
    EXPECT_EQ(back.transition, m.transition);
    EXPECT_EQ(back.reward, m.reward);
    EXPECT_EQ(back.rho0, m.rho0);
    EXPECT_EQ(back.action_coords, m.action_coords);
}

TEST(Environments, ParseWithComments) {
    std::istringstream in(
        "# two states, one action\n"
        "2 1 0.5\n"
        "0 1   # s0 -> s1\n"
        "1 0\n"
        "0.25\n"
        "3.0\n"
        "1 0\n"
        "0\n");
    const auto m = parse_environment(in);
    EXPECT_EQ(m.r_max, 3.0);
    EXPECT_EQ(m.transition(0, 1), 1.0);
}

TEST(Environments, ValidationErrors) {
    auto bad_row = three_chain();
    bad_row.transition(0, 1) = 0.5;
    EXPECT_THROW(bad_row.validate(), ParameterError);
    auto bad_gamma = three_chain();
    bad_gamma.gamma = 1.0;
    EXPECT_THROW(bad_gamma.validate(), ParameterError);
    auto bad_reward = three_chain();
    bad_reward.reward(0, 0) = -1.0;
    EXPECT_THROW(bad_reward.validate(), ParameterError);
    std::istringstream truncated("2 1 0.5\n0 1\n");
    EXPECT_THROW(parse_environment(truncated), ParameterError);
    const auto m = three_chain();
    Policy p = uniform_policy(m);
    p(0, 0) = 0.9;
    EXPECT_THROW(validate_policy(m, p), ParameterError);
}
