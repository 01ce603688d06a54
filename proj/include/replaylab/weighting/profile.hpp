#pragma once

#include "replaylab/weighting/scheme.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace replaylab::weighting {

/// Expected number of times each stored transition is drawn over a run in
/// which the buffer grows by one entry per step and every step performs
/// `updates_per_step` draws of `batch_size` entries.
struct SelectionProfile {
    WeightScheme scheme;
    std::int64_t horizon{0};
    std::int64_t batch_size{1};
    std::int64_t updates_per_step{1};
    /// expected_count[s - 1] is the expectation for the entry inserted at step s.
    std::vector<double> expected_count;
};

/**
 * Weights over ages 1..n of a buffer holding n entries, in the piecewise
 * form shared by every age-determined scheme except the staged sampler:
 *
 *   w(a) = plateau                 for a <= plateau_len
 *        = tail_scale / a          for a >  plateau_len
 *        + shift                   for every a
 *        + bonus                   for a <= bonus_len
 */
struct AgeWeightShape {
    std::int64_t plateau_len{0};
    double plateau{0.0};
    double tail_scale{0.0};
    double shift{0.0};
    std::int64_t bonus_len{0};
    double bonus{0.0};

    double at(std::int64_t age) const;
};

/// Shape of `scheme.bound_to(size)`. Not defined for EREStaged or
/// PriorityBaseline (throws ParameterError).
AgeWeightShape age_weight_shape(const WeightScheme& scheme, std::int64_t size);

/// Exact (no sampling) selection profile. At step n the scheme is bound to
/// the n entries present, so ERE windows track the growing buffer.
///
/// Runs in O(T log T) for shape-based schemes and O(T K) for EREStaged.
SelectionProfile expected_selection_profile(const WeightScheme& scheme, std::int64_t horizon,
                                            std::int64_t batch_size,
                                            std::int64_t updates_per_step);

/// Population coefficient of variation (stddev / mean).
double coefficient_of_variation(std::span<const double> values);

/// Full linear convolution of two real sequences (size a + b - 1).
std::vector<double> linear_convolution(std::span<const double> a, std::span<const double> b);

}  // namespace replaylab::weighting
