#include "replaylab/replay/replay_buffer.hpp"

#include "replaylab/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace replaylab::replay {

double unit_uniform(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

ReplayBuffer::ReplayBuffer(std::optional<std::size_t> capacity) : capacity_(capacity) {
    if (capacity_ && *capacity_ == 0) throw ParameterError("buffer capacity must be positive");
}

void ReplayBuffer::push(const Transition& transition) {
    if (!entries_.empty() && transition.global_time != newest_time_ + 1)
        throw OrderingError(fmt::format("global time {} does not follow {}",
                                        transition.global_time, newest_time_));
    if (entries_.empty() && transition.global_time < 1)
        throw OrderingError("global time is 1-based");
    entries_.push_back(transition);
    priorities_.push_back(max_priority_);
    newest_time_ = transition.global_time;
    if (capacity_ && entries_.size() > *capacity_) {
        entries_.pop_front();
        priorities_.pop_front();
    }
    stale_ = true;
}

void ReplayBuffer::reweight(const weighting::WeightScheme& scheme, std::int64_t now) {
    scheme.validate();
    if (entries_.empty()) throw SamplingError("cannot reweight an empty buffer");
    if (now < newest_time_)
        throw ParameterError(
            fmt::format("reweight time {} precedes newest entry {}", now, newest_time_));
    scheme_ = scheme;
    weight_time_ = now;
    index_.assign(compute_weights(now));
    stale_ = false;
}

void ReplayBuffer::set_priority(std::size_t index, double priority) {
    if (!(priority >= 0.0) || !std::isfinite(priority))
        throw ParameterError("priorities must be finite and non-negative");
    priorities_.at(index) = priority;
    max_priority_ = std::max(max_priority_, priority);
    if (scheme_.kind == weighting::SchemeKind::PriorityBaseline && !stale_)
        index_.set(index, weighting::scheme_weight(scheme_, 1, priority));
}

void ReplayBuffer::refresh() {
    if (!stale_) return;
    if (entries_.empty()) {
        index_.assign({});
        stale_ = false;
        return;
    }
    weight_time_ = newest_time_;
    index_.assign(compute_weights(weight_time_));
    stale_ = false;
}

std::vector<double> ReplayBuffer::compute_weights(std::int64_t now) const {
    std::vector<double> w(entries_.size());
    if (scheme_.kind == weighting::SchemeKind::PriorityBaseline) {
        for (std::size_t i = 0; i < w.size(); ++i)
            w[i] = weighting::scheme_weight(scheme_, 1, priorities_[i]);
        return w;
    }
    const std::int64_t oldest_age = now - entries_.front().global_time + 1;
    const auto by_age = weighting::weight_profile(scheme_.bound_to(oldest_age));
    for (std::size_t i = 0; i < w.size(); ++i) {
        const std::int64_t age = now - entries_[i].global_time + 1;
        w[i] = by_age[static_cast<std::size_t>(age - 1)];
    }
    return w;
}

const WeightIndex& ReplayBuffer::sampler() const {
    if (stale_) throw SamplingError("weight index is stale; call refresh() first");
    return index_;
}

std::vector<std::size_t> draw_indices(const WeightIndex& index, std::size_t batch_size,
                                      std::mt19937_64& rng) {
    if (index.size() == 0) throw SamplingError("cannot sample from an empty buffer");
    const double total = index.total();
    if (!(total > 0.0)) throw SamplingError("cannot sample: total weight is zero");
    std::vector<std::size_t> out(batch_size);
    for (auto& i : out) i = index.find(unit_uniform(rng) * total);
    return out;
}

std::vector<std::size_t> ReplayBuffer::sample_batch(std::size_t batch_size, std::mt19937_64& rng) {
    if (entries_.empty()) throw SamplingError("cannot sample from an empty buffer");
    refresh();
    return draw_indices(index_, batch_size, rng);
}

std::vector<std::size_t> ReplayBuffer::sample_batch(std::size_t batch_size, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    return sample_batch(batch_size, rng);
}

std::span<const double> ReplayBuffer::weights() {
    refresh();
    return index_.weights();
}

double ReplayBuffer::probability(std::size_t index) {
    refresh();
    const double total = index_.total();
    if (!(total > 0.0)) throw SamplingError("total weight is zero");
    return index_.weight(index) / total;
}

}  // namespace replaylab::replay
