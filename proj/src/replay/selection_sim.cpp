#include "replaylab/replay/selection_sim.hpp"

#include "replaylab/errors.hpp"
#include "replaylab/replay/replay_buffer.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace replaylab::replay {

MonteCarloProfile monte_carlo_selection_profile(const weighting::WeightScheme& scheme,
                                                std::int64_t horizon, std::int64_t batch_size,
                                                std::int64_t updates_per_step,
                                                std::int64_t trials, std::uint64_t seed) {
    if (horizon < 1 || batch_size < 1 || updates_per_step < 1 || trials < 1)
        throw ParameterError("horizon, batch size, updates and trials must be positive");
    if (scheme.kind == weighting::SchemeKind::PriorityBaseline)
        throw ParameterError("selection profiles are defined for age-based schemes only");
    scheme.validate();

    const auto T = static_cast<std::size_t>(horizon);
    std::vector<double> sum(T, 0.0), sum_sq(T, 0.0);
    std::vector<double> counts(T);
    const auto draws = static_cast<std::size_t>(batch_size * updates_per_step);

    for (std::int64_t trial = 0; trial < trials; ++trial) {
        std::mt19937_64 rng(seed + static_cast<std::uint64_t>(trial));
        ReplayBuffer buffer;
        std::fill(counts.begin(), counts.end(), 0.0);
        for (std::int64_t n = 1; n <= horizon; ++n) {
            Transition t;
            t.global_time = n;
            t.step = n - 1;
            buffer.push(t);
            buffer.reweight(scheme, n);
            for (std::size_t idx : draw_indices(buffer.sampler(), draws, rng)) counts[idx] += 1.0;
        }
        for (std::size_t s = 0; s < T; ++s) {
            sum[s] += counts[s];
            sum_sq[s] += counts[s] * counts[s];
        }
    }

    MonteCarloProfile out;
    out.trials = trials;
    out.mean_count.resize(T);
    out.std_error.resize(T);
    const double m = static_cast<double>(trials);
    for (std::size_t s = 0; s < T; ++s) {
        const double mean = sum[s] / m;
        const double var = trials > 1 ? std::max(0.0, (sum_sq[s] - m * mean * mean) / (m - 1)) : 0.0;
        out.mean_count[s] = mean;
        out.std_error[s] = std::sqrt(var / m);
    }
    return out;
}

}  // namespace replaylab::replay
