#include "replaylab/analysis/bounds.hpp"

#include "replaylab/errors.hpp"

#include <fmt/format.h>

#include <cmath>

namespace replaylab::analysis {

namespace {

void require(bool ok, const char* what) {
    if (!ok) throw ParameterError(what);
}

struct WeightSums {
    double sum{0.0};
    double sum_sq{0.0};
};

WeightSums weight_sums(std::span<const double> weights) {
    require(!weights.empty(), "weight vector must be non-empty");
    WeightSums s;
    for (double w : weights) {
        if (!(w > 0.0) || !std::isfinite(w))
            throw ParameterError(fmt::format("weights must be finite and positive, got {}", w));
        s.sum += w;
        s.sum_sq += w * w;
    }
    return s;
}

// Shared structure of every bound; `inv_n` plays the role of 1/N.
BoundTerms assemble(const BoundInputs& in, double inv_n, double truncation_factor) {
    const double g = in.gamma;
    const double log_term = std::log(2.0 / in.delta);
    BoundTerms t;
    t.variance_initial = in.r_max / (1.0 - g) * std::sqrt(inv_n / 2.0 * log_term);
    const double coef = in.r_max / ((1.0 - g) * (1.0 - g)) + 2.0 * in.lipschitz * in.diam / (1.0 - g);
    t.variance_middle = coef * std::sqrt(2.0 * inv_n * log_term);
    t.truncation = coef * truncation_factor;
    t.bellman = in.bellman_err / (1.0 - g);
    t.mismatch = 2.0 * in.lipschitz * in.w1_err / (1.0 - g);
    t.total = t.variance_initial + t.variance_middle + t.truncation + t.bellman + t.mismatch;
    return t;
}

double truncation_power(const BoundInputs& in) {
    if (!in.horizon) return 0.0;
    return std::pow(in.gamma, static_cast<double>(*in.horizon - in.step));
}

}  // namespace

void BoundInputs::validate() const {
    require(std::isfinite(r_max) && r_max > 0.0, "r_max must be positive");
    require(gamma > 0.0 && gamma < 1.0, "gamma must lie in (0, 1)");
    require(std::isfinite(lipschitz) && lipschitz >= 0.0, "lipschitz constant must be >= 0");
    require(std::isfinite(diam) && diam >= 0.0, "action diameter must be >= 0");
    require(delta > 0.0 && delta < 1.0, "delta must lie in (0, 1)");
    require(episodes >= 1, "episodes must be >= 1");
    require(step >= 0, "step must be >= 0");
    if (horizon) require(step < *horizon, "step must be smaller than the horizon");
    require(std::isfinite(bellman_err) && bellman_err >= 0.0, "bellman error must be >= 0");
    require(std::isfinite(w1_err) && w1_err >= 0.0, "W1 error must be >= 0");
    if (episode_weights) {
        require(episode_weights->size() == static_cast<std::size_t>(episodes),
                "need one weight per episode");
        weight_sums(*episode_weights);
    }
}

double hoeffding_error(std::span<const double> weights) {
    const auto s = weight_sums(weights);
    return std::sqrt(s.sum_sq) / s.sum;
}

double azuma_weighted_error(std::span<const double> weights, double range, double delta) {
    require(std::isfinite(range) && range > 0.0, "range must be positive");
    require(delta > 0.0 && delta <= 1.0, "delta must lie in (0, 1]");
    const auto s = weight_sums(weights);
    return range * std::sqrt(2.0 * s.sum_sq * std::log(1.0 / delta)) / s.sum;
}

BoundTerms theorem1_terms(const BoundInputs& in) {
    in.validate();
    require(in.step == 0 && !in.horizon && !in.episode_weights,
            "the base bound needs step 0, an infinite horizon and no episode weights");
    return assemble(in, 1.0 / static_cast<double>(in.episodes), 0.0);
}

BoundTerms corollary1_terms(const BoundInputs& in) {
    in.validate();
    return assemble(in, 1.0 / static_cast<double>(in.episodes), truncation_power(in));
}

BoundTerms corollary2_weighted_terms(const BoundInputs& in) {
    in.validate();
    require(in.episode_weights.has_value(), "weighted bound needs episode weights");
    const auto s = weight_sums(*in.episode_weights);
    return assemble(in, s.sum_sq / (s.sum * s.sum), truncation_power(in));
}

double theorem1_rhs(const BoundInputs& in) { return theorem1_terms(in).total; }
double corollary1_rhs(const BoundInputs& in) { return corollary1_terms(in).total; }
double corollary2_weighted_rhs(const BoundInputs& in) { return corollary2_weighted_terms(in).total; }

BoundTerms bound_terms(const BoundInputs& in) {
    return in.episode_weights ? corollary2_weighted_terms(in) : corollary1_terms(in);
}

}  // namespace replaylab::analysis
