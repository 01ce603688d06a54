#include "replaylab/replay/weight_index.hpp"

#include "replaylab/errors.hpp"

#include <bit>
#include <cmath>

namespace replaylab::replay {

WeightIndex::WeightIndex(std::span<const double> weights) { assign(weights); }

void WeightIndex::assign(std::span<const double> weights) {
    for (double w : weights)
        if (!(w >= 0.0) || !std::isfinite(w))
            throw ParameterError("sampling weights must be finite and non-negative");
    weights_.assign(weights.begin(), weights.end());
    const std::size_t n = weights_.size();
    tree_.assign(n + 1, 0.0);
    for (std::size_t i = 1; i <= n; ++i) {
        tree_[i] += weights_[i - 1];
        const std::size_t parent = i + (i & (~i + 1));
        if (parent <= n) tree_[parent] += tree_[i];
    }
    top_bit_ = n == 0 ? 0 : std::bit_floor(n);
}

void WeightIndex::set(std::size_t index, double weight) {
    if (!(weight >= 0.0) || !std::isfinite(weight))
        throw ParameterError("sampling weights must be finite and non-negative");
    const double delta = weight - weights_.at(index);
    weights_[index] = weight;
    for (std::size_t i = index + 1; i < tree_.size(); i += i & (~i + 1)) tree_[i] += delta;
}

double WeightIndex::prefix(std::size_t count) const {
    double sum = 0.0;
    for (std::size_t i = count; i > 0; i -= i & (~i + 1)) sum += tree_[i];
    return sum;
}

double WeightIndex::total() const { return prefix(weights_.size()); }

std::size_t WeightIndex::find(double target) const {
    // Descend the implicit binary structure; `pos` is the largest prefix
    // length whose sum is <= target.
    std::size_t pos = 0;
    double remaining = target;
    for (std::size_t step = top_bit_; step > 0; step >>= 1) {
        const std::size_t next = pos + step;
        if (next < tree_.size() && tree_[next] <= remaining) {
            pos = next;
            remaining -= tree_[next];
        }
    }
    // Round-off can push pos past the last positive entry; step back to it.
    std::size_t index = pos < weights_.size() ? pos : weights_.size() - 1;
    while (weights_[index] == 0.0 && index > 0) --index;
    while (weights_[index] == 0.0 && index + 1 < weights_.size()) ++index;
    return index;
}

}  // namespace replaylab::replay
