#include "replaylab/weighting/ere.hpp"

#include "replaylab/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace replaylab::weighting {
namespace {

void check_age(const WeightScheme& scheme, std::int64_t age) {
    if (age < 1 || age > scheme.buffer_size)
        throw ParameterError(
            fmt::format("age {} outside [1, N0={}]", age, scheme.buffer_size));
}

void check_closed_form(const WeightScheme& scheme) {
    scheme.validate();
    if (!(scheme.eta < 1.0))
        throw ParameterError("closed-form ERE weights are undefined at eta = 1; use uniform");
}

// N0 * eta^L0, the coverage of the last stage before the c_min clamp.
double last_stage_span(const WeightScheme& s) {
    return static_cast<double>(s.buffer_size) *
           std::exp(static_cast<double>(s.max_horizon) * std::log(s.eta));
}

}  // namespace

std::int64_t ere_stage_coverage(std::int64_t k, const WeightScheme& scheme) {
    scheme.validate();
    if (k < 1 || k > scheme.updates_per_episode)
        throw ParameterError(
            fmt::format("stage {} outside [1, K={}]", k, scheme.updates_per_episode));
    const double exponent = static_cast<double>(k) * static_cast<double>(scheme.max_horizon) /
                            static_cast<double>(scheme.updates_per_episode);
    const double span = static_cast<double>(scheme.buffer_size) * std::pow(scheme.eta, exponent);
    const auto rounded = static_cast<std::int64_t>(std::llround(span));
    return std::clamp(rounded, scheme.min_coverage, scheme.buffer_size);
}

std::vector<std::int64_t> ere_stage_coverages(const WeightScheme& scheme) {
    std::vector<std::int64_t> c(static_cast<std::size_t>(scheme.updates_per_episode));
    for (std::int64_t k = 1; k <= scheme.updates_per_episode; ++k)
        c[static_cast<std::size_t>(k - 1)] = ere_stage_coverage(k, scheme);
    return c;
}

double ere_aggregate_oracle(const WeightScheme& scheme, std::int64_t age) {
    scheme.validate();
    check_age(scheme, age);
    double sum = 0.0;
    for (std::int64_t k = 1; k <= scheme.updates_per_episode; ++k) {
        const std::int64_t c = ere_stage_coverage(k, scheme);
        if (c >= age) sum += 1.0 / static_cast<double>(c);
    }
    return sum;
}

std::vector<double> ere_aggregate_profile(const WeightScheme& scheme) {
    const auto coverages = ere_stage_coverages(scheme);
    // coverages are non-increasing, so the stages covering age t are a prefix.
    std::vector<double> prefix(coverages.size() + 1, 0.0);
    for (std::size_t k = 0; k < coverages.size(); ++k)
        prefix[k + 1] = prefix[k] + 1.0 / static_cast<double>(coverages[k]);

    std::vector<double> w(static_cast<std::size_t>(scheme.buffer_size));
    std::size_t covering = coverages.size();
    for (std::int64_t t = 1; t <= scheme.buffer_size; ++t) {
        while (covering > 0 && coverages[covering - 1] < t) --covering;
        w[static_cast<std::size_t>(t - 1)] = prefix[covering];
    }
    return w;
}

double ere_exact_weight(const WeightScheme& scheme, std::int64_t age) {
    check_closed_form(scheme);
    check_age(scheme, age);
    const double n0 = static_cast<double>(scheme.buffer_size);
    const double c_min = static_cast<double>(scheme.min_coverage);
    const double l0 = static_cast<double>(scheme.max_horizon);
    const double k = static_cast<double>(scheme.updates_per_episode);
    const double log_eta = std::log(scheme.eta);

    // 1 - eta^(L0/K), computed without cancellation.
    const double stage_decay = -std::expm1(l0 / k * log_eta);
    const double reach =
        std::max({static_cast<double>(age), c_min, last_stage_span(scheme)});
    const double decayed = (1.0 / reach - 1.0 / n0) / stage_decay;
    if (decayed < 0.0) throw ParameterError("ERE exact weight left its formula domain");

    double floor_stages = 0.0;
    if (age <= scheme.min_coverage)
        floor_stages = k / c_min * std::max(1.0 - std::log(c_min / n0) / (l0 * log_eta), 0.0);
    return decayed + floor_stages;
}

double ere_apx_weight(const WeightScheme& scheme, std::int64_t age) {
    check_closed_form(scheme);
    check_age(scheme, age);
    const double n0 = static_cast<double>(scheme.buffer_size);
    const double c_min = static_cast<double>(scheme.min_coverage);
    const double l0 = static_cast<double>(scheme.max_horizon);

    const double reach =
        std::max({static_cast<double>(age), c_min, last_stage_span(scheme)});
    const double decayed = 1.0 / reach - 1.0 / n0;
    if (decayed < 0.0) throw ParameterError("ERE approximate weight left its formula domain");

    double floor_stages = 0.0;
    if (age <= scheme.min_coverage) {
        // ln(c_min / (N0 eta^L0)) without forming eta^L0, which underflows for small eta.
        const double log_ratio = std::log(c_min / n0) - l0 * std::log(scheme.eta);
        floor_stages = std::max(log_ratio, 0.0) / c_min;
    }
    return decayed + floor_stages;
}

}  // namespace replaylab::weighting
