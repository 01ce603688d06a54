#pragma once

// Emphasizing-recent-experience weights: the staged sampler itself, the exact
// aggregate of its K stages, and the closed forms of that aggregate.

#include "replaylab/weighting/scheme.hpp"

#include <cstdint>
#include <vector>

namespace replaylab::weighting {

/// Number of newest entries covered by stage k (1 <= k <= K).
/// N0 * eta^(k L0 / K) is rounded to the nearest integer, then clamped to
/// [c_min, N0].
std::int64_t ere_stage_coverage(std::int64_t k, const WeightScheme& scheme);

/// c_1..c_K; non-increasing in k.
std::vector<std::int64_t> ere_stage_coverages(const WeightScheme& scheme);

/// Sum of 1/c_k over the stages whose window contains `age`, evaluated by
/// direct summation over k. Ground truth for the closed forms below.
double ere_aggregate_oracle(const WeightScheme& scheme, std::int64_t age);

/// ere_aggregate_oracle for every age 1..N0 in O(N0 + K).
std::vector<double> ere_aggregate_profile(const WeightScheme& scheme);

/// Closed form of the staged aggregate with the summation cutoff taken as a
/// real number. Requires eta < 1 and 1 <= age <= N0.
double ere_exact_weight(const WeightScheme& scheme, std::int64_t age);

/// First-order (Taylor) simplification of ere_exact_weight; independent of K.
double ere_apx_weight(const WeightScheme& scheme, std::int64_t age);

}  // namespace replaylab::weighting
