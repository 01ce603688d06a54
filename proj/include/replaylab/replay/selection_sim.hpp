#pragma once

#include "replaylab/weighting/scheme.hpp"

#include <cstdint>
#include <vector>

namespace replaylab::replay {

/// Sampled counterpart of weighting::expected_selection_profile.
struct MonteCarloProfile {
    std::int64_t trials{0};
    /// Mean draw count of the entry inserted at step s, at index s - 1.
    std::vector<double> mean_count;
    /// Standard error of mean_count across trials.
    std::vector<double> std_error;
};

/// Replays the growing-buffer experiment `trials` times: push one transition
/// per step, reweight at the current time, draw `updates_per_step` batches of
/// `batch_size`, and tally how often each entry is drawn. Trial j uses the
/// engine seeded with seed + j.
///
/// EREStaged draws from the aggregate of its stages, which has the same
/// per-draw law as cycling through all K windows.
MonteCarloProfile monte_carlo_selection_profile(const weighting::WeightScheme& scheme,
                                                std::int64_t horizon, std::int64_t batch_size,
                                                std::int64_t updates_per_step,
                                                std::int64_t trials, std::uint64_t seed);

}  // namespace replaylab::replay
