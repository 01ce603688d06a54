#pragma once

#include "replaylab/replay/transition.hpp"
#include "replaylab/replay/weight_index.hpp"
#include "replaylab/weighting/scheme.hpp"

#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>
#include <random>
#include <span>
#include <vector>

namespace replaylab::replay {

/// Uniform double in [0, 1) from 53 random bits; identical on every platform
/// for a given engine state, unlike std::uniform_real_distribution.
double unit_uniform(std::mt19937_64& rng);

/**
 * Growing replay buffer with weighted mini-batch sampling.
 *
 * Entries keep insertion order (index 0 is the oldest). Under an age-based
 * scheme every weight changes whenever a transition arrives, so pushes only
 * mark the weight index stale; it is rebuilt in O(n) on the next refresh() or
 * sample_batch(), after which each draw costs O(log n).
 *
 * Single writer. Once refreshed, sampler() is an immutable snapshot that
 * several readers may draw from concurrently with their own engines.
 */
class ReplayBuffer {
public:
    ReplayBuffer() = default;
    /// `capacity` of nullopt means unbounded; otherwise FIFO eviction.
    explicit ReplayBuffer(std::optional<std::size_t> capacity);

    /// Throws OrderingError unless transition.global_time is exactly one more
    /// than the newest stored time (any value >= 1 for the first push).
    void push(const Transition& transition);

    /// Re-derives every weight from `scheme` as seen at global time `now`.
    /// The entry stamped g gets weight w(now - g + 1) under the scheme bound
    /// to the current buffer size. Throws ParameterError for invalid schemes
    /// or `now` earlier than the newest entry.
    void reweight(const weighting::WeightScheme& scheme, std::int64_t now);

    /// Priority used by the PriorityBaseline scheme; new entries start at the
    /// largest priority seen so far (1 for an empty history).
    void set_priority(std::size_t index, double priority);
    double priority(std::size_t index) const { return priorities_.at(index); }

    /// Rebuilds the weight index if pushes or evictions made it stale.
    void refresh();

    /// `batch_size` indices drawn i.i.d. in proportion to the current weights.
    /// Throws SamplingError on an empty buffer or zero total weight.
    std::vector<std::size_t> sample_batch(std::size_t batch_size, std::uint64_t seed);
    std::vector<std::size_t> sample_batch(std::size_t batch_size, std::mt19937_64& rng);

    /// Immutable view of the weight index; requires a prior refresh().
    const WeightIndex& sampler() const;

    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }
    std::optional<std::size_t> capacity() const { return capacity_; }
    const Transition& operator[](std::size_t index) const { return entries_[index]; }
    const Transition& at(std::size_t index) const { return entries_.at(index); }
    std::int64_t newest_time() const { return newest_time_; }

    const weighting::WeightScheme& scheme() const { return scheme_; }
    bool stale() const { return stale_; }

    /// Current per-entry weights (refreshes first).
    std::span<const double> weights();
    /// Current sampling probability of one entry (refreshes first).
    double probability(std::size_t index);

private:
    std::vector<double> compute_weights(std::int64_t now) const;

    std::optional<std::size_t> capacity_;
    std::deque<Transition> entries_;
    std::deque<double> priorities_;
    double max_priority_{1.0};
    std::int64_t newest_time_{0};

    weighting::WeightScheme scheme_{};
    std::int64_t weight_time_{0};
    WeightIndex index_;
    bool stale_{false};
};

/// Draws i.i.d. indices from a frozen weight index.
std::vector<std::size_t> draw_indices(const WeightIndex& index, std::size_t batch_size,
                                      std::mt19937_64& rng);

}  // namespace replaylab::replay
