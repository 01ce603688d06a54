#pragma once

#include "replaylab/mdp/tabular_mdp.hpp"
#include "replaylab/weighting/scheme.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace replaylab::mdp {

struct TrainConfig {
    std::int64_t episodes{200};
    std::int64_t traj_len{40};
    std::int64_t batches_per_episode{50};
    std::int64_t batch_size{64};
    /// Bellman targets are frozen for this many batches.
    std::int64_t target_refresh{10};
    double learning_rate{0.5};
    /// Softmax temperature after episode e: max(tau_min, tau_initial * tau_decay^(e-1)).
    double tau_initial{1.0};
    double tau_min{0.05};
    double tau_decay{0.9};
    double delta{0.05};
    /// Trajectory step i and horizon L of the error measurement; the horizon
    /// defaults to traj_len.
    std::int64_t eval_step{0};
    std::optional<std::int64_t> eval_horizon;
    /// Replace the mini-batch fit by the exact Q of the current policy.
    bool exact_fit{false};
    /// Weight episodes by their share of the sampling mass and use the
    /// weighted-episode bound.
    bool weighted_bound{false};
    std::optional<std::size_t> capacity;

    void validate() const;
};

struct RunRecord {
    std::int64_t episode{0};
    /// Exact discounted return of the policy that generated this episode.
    double return_value{0.0};
    /// E_{rho_bar_i, pi_i^D} |Q_hat - Q^{pi^N}| with Q_hat clipped to range.
    double lhs_error{0.0};
    double rhs_bound{0.0};
    double eps_q{0.0};
    double w1{0.0};
    std::int64_t buffer_size{0};
    /// Lipschitz constant used in the bound.
    double lipschitz{0.0};
    /// Largest distance of the raw Q_hat outside [0, r_max / (1 - gamma)].
    double clip_violation{0.0};
};

/// Age-based scheme scaled to a training run: the ERE horizon is the
/// trajectory length, eta keeps eta^L0 at its reference value 0.996^1000, the
/// smallest window covers five trajectories and K is the number of batches
/// per episode.
weighting::WeightScheme training_scheme(weighting::SchemeKind kind, const TrainConfig& config);

/// max over states and action pairs of |Q(s,a) - Q(s,b)| / |x_a - x_b|.
double empirical_lipschitz(const Eigen::MatrixXd& q, std::span<const double> coords);

/**
 * Off-policy actor-critic loop on a tabular MDP. Each episode samples a
 * trajectory under the current policy, stores it, fits Q_hat on mini-batches
 * drawn by `scheme` toward Bellman targets of the current policy, records the
 * measured error against the bound, then moves to the softmax policy of
 * Q_hat. Deterministic in `seed`.
 *
 * Throws DivergenceError if any Q_hat entry leaves
 * [-10 r_max / (1 - gamma), 10 r_max / (1 - gamma)].
 */
std::vector<RunRecord> run_off_policy_loop(const TabularMDP& mdp, const weighting::WeightScheme& scheme,
                                           const TrainConfig& config, std::uint64_t seed);

/// One run per seed, spread over `workers` threads (0 = hardware
/// concurrency). Results are in the order of `seeds`.
std::vector<std::vector<RunRecord>> run_seed_sweep(const TabularMDP& mdp,
                                                   const weighting::WeightScheme& scheme,
                                                   const TrainConfig& config,
                                                   std::span<const std::uint64_t> seeds,
                                                   unsigned workers = 0);

/// Fraction of `trials` independent runs (seeds seed, seed + 1, ...) whose
/// final-episode LHS exceeds the bound.
double bound_violation_rate(const TabularMDP& mdp, const weighting::WeightScheme& scheme,
                            const TrainConfig& config, std::int64_t trials, std::uint64_t seed,
                            unsigned workers = 0);

}  // namespace replaylab::mdp
