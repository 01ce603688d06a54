#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace replaylab::replay {

/// Fenwick tree over non-negative weights supporting O(log n) point updates
/// and inverse-CDF lookup. Immutable readers (total, find) may run
/// concurrently.
class WeightIndex {
public:
    WeightIndex() = default;
    explicit WeightIndex(std::span<const double> weights);

    /// O(n) rebuild from scratch.
    void assign(std::span<const double> weights);
    void set(std::size_t index, double weight);

    std::size_t size() const { return weights_.size(); }
    double weight(std::size_t index) const { return weights_[index]; }
    std::span<const double> weights() const { return weights_; }

    double total() const;
    /// Sum of weights[0..count).
    double prefix(std::size_t count) const;

    /// Smallest index i with prefix(i + 1) > target, for target in
    /// [0, total()). Entries of zero weight are never returned.
    std::size_t find(double target) const;

private:
    std::vector<double> weights_;
    std::vector<double> tree_;  // 1-based Fenwick partial sums
    std::size_t top_bit_{0};
};

}  // namespace replaylab::replay
