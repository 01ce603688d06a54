#include "replaylab/mdp/off_policy_loop.hpp"

#include "replaylab/analysis/bounds.hpp"
#include "replaylab/errors.hpp"
#include "replaylab/mdp/behavior.hpp"
#include "replaylab/mdp/dynamic_programming.hpp"
#include "replaylab/mdp/empirical_errors.hpp"
#include "replaylab/replay/replay_buffer.hpp"
#include "replaylab/weighting/ere.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <random>
#include <thread>

namespace replaylab::mdp {

using weighting::SchemeKind;
using weighting::WeightScheme;

void TrainConfig::validate() const {
    if (episodes < 1 || traj_len < 1) throw ParameterError("episodes and traj_len must be positive");
    if (batches_per_episode < 0 || batch_size < 1 || target_refresh < 1)
        throw ParameterError("batch settings must be positive");
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) throw ParameterError("learning rate must be positive");
    if (!(tau_initial > 0.0) || !(tau_min > 0.0) || !(tau_decay > 0.0 && tau_decay <= 1.0))
        throw ParameterError("temperature schedule must be positive with decay in (0, 1]");
    if (!(delta > 0.0 && delta < 1.0)) throw ParameterError("delta must lie in (0, 1)");
    const auto horizon = eval_horizon.value_or(traj_len);
    if (eval_step < 0 || eval_step >= horizon)
        throw ParameterError("evaluation step must satisfy 0 <= i < L");
    if (eval_step > traj_len) throw ParameterError("evaluation step exceeds the trajectory length");
    if (capacity && *capacity == 0) throw ParameterError("capacity must be positive");
}

WeightScheme training_scheme(SchemeKind kind, const TrainConfig& config) {
    switch (kind) {
        case SchemeKind::Uniform: return WeightScheme::uniform();
        case SchemeKind::OneOverAge: return WeightScheme::one_over_age();
        case SchemeKind::PriorityBaseline: return WeightScheme::priority(1.0);
        default: break;
    }
    const std::int64_t horizon = config.traj_len;
    const std::int64_t total = config.episodes * config.traj_len;
    const double eta = std::pow(0.996, 1000.0 / static_cast<double>(horizon));
    const std::int64_t k = std::max<std::int64_t>(1, config.batches_per_episode);
    return WeightScheme::ere(kind, total, horizon, eta, std::min(total, 5 * horizon), k);
}

double empirical_lipschitz(const Eigen::MatrixXd& q, std::span<const double> coords) {
    double best = 0.0;
    for (Eigen::Index s = 0; s < q.rows(); ++s)
        for (Eigen::Index a = 0; a < q.cols(); ++a)
            for (Eigen::Index b = a + 1; b < q.cols(); ++b) {
                const double dx = std::abs(coords[a] - coords[b]);
                if (dx > 0.0) best = std::max(best, std::abs(q(s, a) - q(s, b)) / dx);
            }
    return best;
}

namespace {

struct EpisodeCache {
    Policy policy;
    Eigen::VectorXd start;      // state distribution at the evaluation step
    Eigen::VectorXd occupancy;  // occupancy started from `start`
};

Trajectory sample_trajectory(const TabularMDP& mdp, const Policy& pi, std::int64_t episode,
                             std::int64_t length, std::int64_t first_time, std::mt19937_64& rng) {
    Trajectory traj;
    traj.reserve(static_cast<std::size_t>(length));
    int s = sample_categorical(mdp.rho0, rng);
    for (std::int64_t j = 0; j < length; ++j) {
        replay::Transition t;
        t.state = s;
        t.action = sample_categorical(pi.row(s).transpose(), rng);
        t.reward = mdp.reward(s, t.action);
        t.next_state = sample_categorical(mdp.transition.row(mdp.row(s, t.action)).transpose(), rng);
        t.episode = episode;
        t.step = j;
        t.global_time = first_time + j;
        traj.push_back(t);
        s = t.next_state;
    }
    return traj;
}

std::vector<std::size_t> draw_batch(replay::ReplayBuffer& buffer, const WeightScheme& scheme,
                                    std::int64_t batch_index, std::int64_t batch_size,
                                    std::mt19937_64& rng) {
    if (scheme.kind != SchemeKind::EREStaged)
        return buffer.sample_batch(static_cast<std::size_t>(batch_size), rng);
    // The staged sampler proper: batch k of the episode draws uniformly from
    // the newest c_k entries.
    const auto n = static_cast<std::int64_t>(buffer.size());
    const auto bound = scheme.bound_to(n);
    const std::int64_t k = batch_index % bound.updates_per_episode + 1;
    const std::int64_t window = weighting::ere_stage_coverage(k, bound);
    std::vector<std::size_t> out(static_cast<std::size_t>(batch_size));
    for (auto& idx : out) {
        const auto back = static_cast<std::int64_t>(replay::unit_uniform(rng) * static_cast<double>(window));
        idx = static_cast<std::size_t>(n - 1 - std::min(back, window - 1));
    }
    return out;
}

void check_divergence(const Eigen::MatrixXd& q, double limit, std::int64_t episode) {
    if (!q.allFinite() || q.cwiseAbs().maxCoeff() > limit)
        throw DivergenceError(fmt::format("Q estimate diverged in episode {} (|Q| above {})", episode, limit));
}

}  // namespace

std::vector<RunRecord> run_off_policy_loop(const TabularMDP& mdp, const WeightScheme& scheme,
                                           const TrainConfig& config, std::uint64_t seed) {
    mdp.validate();
    scheme.validate();
    config.validate();
    const std::int64_t i = config.eval_step;
    const std::int64_t horizon = config.eval_horizon.value_or(config.traj_len);
    const double q_max = mdp.r_max / (1.0 - mdp.gamma);
    const double q_limit = 10.0 * q_max;

    std::mt19937_64 rng(seed);
    replay::ReplayBuffer buffer(config.capacity);
    std::vector<Trajectory> trajectories;
    std::vector<EpisodeCache> history;
    std::vector<RunRecord> records;
    Policy pi = uniform_policy(mdp);
    Eigen::MatrixXd q_hat = Eigen::MatrixXd::Zero(mdp.n_states, mdp.n_actions);
    std::int64_t now = 0;

    for (std::int64_t e = 1; e <= config.episodes; ++e) {
        trajectories.push_back(sample_trajectory(mdp, pi, e, config.traj_len, now + 1, rng));
        for (const auto& t : trajectories.back()) buffer.push(t);
        now += config.traj_len;
        buffer.reweight(scheme, now);

        if (config.exact_fit) {
            q_hat = exact_q(mdp, pi);
        } else {
            Eigen::MatrixXd q_target = q_hat;
            Eigen::MatrixXd residual_sum(mdp.n_states, mdp.n_actions);
            Eigen::MatrixXd hits(mdp.n_states, mdp.n_actions);
            for (std::int64_t b = 0; b < config.batches_per_episode; ++b) {
                if (b % config.target_refresh == 0) q_target = q_hat;
                const Eigen::VectorXd next_value = q_target.cwiseProduct(pi).rowwise().sum();
                residual_sum.setZero();
                hits.setZero();
                const auto batch = draw_batch(buffer, scheme, b, config.batch_size, rng);
                for (std::size_t idx : batch) {
                    const auto& t = buffer[idx];
                    const double target = t.reward + mdp.gamma * next_value[t.next_state];
                    const double residual = target - q_hat(t.state, t.action);
                    residual_sum(t.state, t.action) += residual;
                    hits(t.state, t.action) += 1.0;
                    if (scheme.kind == SchemeKind::PriorityBaseline)
                        buffer.set_priority(idx, std::abs(residual) + 1e-3);
                }
                for (int s = 0; s < mdp.n_states; ++s)
                    for (int a = 0; a < mdp.n_actions; ++a)
                        if (hits(s, a) > 0.0)
                            q_hat(s, a) += config.learning_rate * residual_sum(s, a) / hits(s, a);
                check_divergence(q_hat, q_limit, e);
            }
        }
        check_divergence(q_hat, q_limit, e);

        // Measurement against the exact oracles.
        history.push_back({pi, state_distribution_at(mdp, mdp.rho0, pi, i), {}});
        history.back().occupancy = occupancy_measure(mdp, history.back().start, pi);

        std::optional<std::vector<double>> weights;
        if (config.weighted_bound) {
            std::vector<double> w(trajectories.size(), 0.0);
            const auto current = buffer.weights();
            for (std::size_t k = 0; k < buffer.size(); ++k)
                w[static_cast<std::size_t>(buffer[k].episode - 1)] += current[k];
            const double peak = *std::max_element(w.begin(), w.end());
            for (auto& x : w) x = std::max(x, 1e-12 * peak);
            weights = std::move(w);
        }
        std::vector<Policy> policies;
        std::vector<Eigen::VectorXd> starts, occupancies;
        for (const auto& h : history) {
            policies.push_back(h.policy);
            starts.push_back(h.start);
            occupancies.push_back(h.occupancy);
        }
        std::optional<std::span<const double>> weight_view;
        if (weights) weight_view = std::span<const double>(*weights);
        const auto mix = mix_behavior(mdp, policies, starts, occupancies, weight_view);

        const Eigen::MatrixXd q_clipped = q_hat.cwiseMax(0.0).cwiseMin(q_max);
        const Eigen::MatrixXd q_true = exact_q(mdp, pi);

        RunRecord rec;
        rec.episode = e;
        rec.buffer_size = static_cast<std::int64_t>(buffer.size());
        rec.return_value = mdp.rho0.dot(exact_v(mdp, pi));
        rec.clip_violation = std::max({0.0, -q_hat.minCoeff(), q_hat.maxCoeff() - q_max});
        rec.lhs_error = mix.state_dist.dot(
            (mix.policy.cwiseProduct((q_clipped - q_true).cwiseAbs())).rowwise().sum());
        const auto errs = empirical_errors(mdp, trajectories, q_clipped, pi, mix.policy, i, horizon, weight_view);
        rec.eps_q = errs.bellman;
        rec.w1 = errs.w1;
        rec.lipschitz = std::max(empirical_lipschitz(q_clipped, mdp.action_coords),
                                 empirical_lipschitz(q_true, mdp.action_coords));

        analysis::BoundInputs in;
        in.r_max = mdp.r_max;
        in.gamma = mdp.gamma;
        in.lipschitz = rec.lipschitz;
        in.diam = mdp.action_diameter();
        in.delta = config.delta;
        in.episodes = e;
        in.step = i;
        in.horizon = horizon;
        in.bellman_err = rec.eps_q;
        in.w1_err = rec.w1;
        in.episode_weights = weights;
        rec.rhs_bound = analysis::bound_terms(in).total;
        records.push_back(rec);

        const double tau = std::max(config.tau_min,
                                    config.tau_initial * std::pow(config.tau_decay, static_cast<double>(e - 1)));
        pi = softmax_policy(q_hat, tau);
    }
    return records;
}

std::vector<std::vector<RunRecord>> run_seed_sweep(const TabularMDP& mdp, const WeightScheme& scheme,
                                                   const TrainConfig& config,
                                                   std::span<const std::uint64_t> seeds,
                                                   unsigned workers) {
    std::vector<std::vector<RunRecord>> results(seeds.size());
    std::vector<std::exception_ptr> failures(seeds.size());
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(1, seeds.size())));

    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t k = next++; k < seeds.size(); k = next++) {
            try {
                results[k] = run_off_policy_loop(mdp, scheme, config, seeds[k]);
            } catch (...) {
                failures[k] = std::current_exception();
            }
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    }
    for (auto& f : failures)
        if (f) std::rethrow_exception(f);
    return results;
}

double bound_violation_rate(const TabularMDP& mdp, const WeightScheme& scheme,
                            const TrainConfig& config, std::int64_t trials, std::uint64_t seed,
                            unsigned workers) {
    if (trials < 1) throw ParameterError("need at least one trial");
    std::vector<std::uint64_t> seeds(static_cast<std::size_t>(trials));
    for (std::size_t k = 0; k < seeds.size(); ++k) seeds[k] = seed + k;
    const auto runs = run_seed_sweep(mdp, scheme, config, seeds, workers);
    std::int64_t violations = 0;
    for (const auto& run : runs)
        if (run.back().lhs_error > run.back().rhs_bound) ++violations;
    return static_cast<double>(violations) / static_cast<double>(trials);
}

}  // namespace replaylab::mdp
