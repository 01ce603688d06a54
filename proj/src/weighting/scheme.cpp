#include "replaylab/weighting/scheme.hpp"

#include "replaylab/errors.hpp"
#include "replaylab/weighting/ere.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace replaylab::weighting {

std::string_view to_string(SchemeKind kind) {
    switch (kind) {
        case SchemeKind::Uniform: return "uniform";
        case SchemeKind::OneOverAge: return "one-over-age";
        case SchemeKind::EREStaged: return "ere-staged";
        case SchemeKind::EREExact: return "ere-exact";
        case SchemeKind::EREApprox: return "ere-approx";
        case SchemeKind::PriorityBaseline: return "priority";
    }
    return "unknown";
}

SchemeKind parse_scheme_kind(std::string_view name) {
    for (auto kind : {SchemeKind::Uniform, SchemeKind::OneOverAge, SchemeKind::EREStaged,
                      SchemeKind::EREExact, SchemeKind::EREApprox,
                      SchemeKind::PriorityBaseline}) {
        if (to_string(kind) == name) return kind;
    }
    throw ParameterError(fmt::format("unknown sampling scheme '{}'", name));
}

bool is_ere(SchemeKind kind) {
    return kind == SchemeKind::EREStaged || kind == SchemeKind::EREExact ||
           kind == SchemeKind::EREApprox;
}

WeightScheme WeightScheme::uniform() { return WeightScheme{}; }

WeightScheme WeightScheme::one_over_age() {
    WeightScheme s;
    s.kind = SchemeKind::OneOverAge;
    return s;
}

WeightScheme WeightScheme::ere(SchemeKind kind, std::int64_t buffer_size,
                               std::int64_t max_horizon, double eta,
                               std::int64_t min_coverage, std::int64_t updates_per_episode) {
    if (!is_ere(kind)) throw ParameterError("WeightScheme::ere needs an ERE kind");
    WeightScheme s;
    s.kind = kind;
    s.buffer_size = buffer_size;
    s.max_horizon = max_horizon;
    s.eta = eta;
    s.min_coverage = min_coverage;
    s.updates_per_episode = updates_per_episode;
    s.validate();
    return s;
}

WeightScheme WeightScheme::priority(double exponent) {
    WeightScheme s;
    s.kind = SchemeKind::PriorityBaseline;
    s.priority_exponent = exponent;
    s.validate();
    return s;
}

void WeightScheme::validate() const {
    if (kind == SchemeKind::PriorityBaseline) {
        if (!(priority_exponent >= 0.0) || !std::isfinite(priority_exponent))
            throw ParameterError("priority exponent must be finite and >= 0");
        return;
    }
    if (!is_ere(kind)) return;
    if (buffer_size < 1) throw ParameterError("ERE buffer size N0 must be >= 1");
    if (max_horizon < 1) throw ParameterError("ERE max horizon L0 must be >= 1");
    if (updates_per_episode < 1) throw ParameterError("ERE update count K must be >= 1");
    if (!(eta > 0.0 && eta <= 1.0)) throw ParameterError("ERE eta must lie in (0, 1]");
    if (min_coverage < 1) throw ParameterError("ERE c_min must be >= 1");
    if (min_coverage > buffer_size) throw ParameterError("ERE c_min must not exceed N0");
    if ((kind == SchemeKind::EREExact || kind == SchemeKind::EREApprox) && eta >= 1.0)
        throw ParameterError("closed-form ERE weights are undefined at eta = 1; use uniform");
}

WeightScheme WeightScheme::bound_to(std::int64_t size) const {
    if (size < 1) throw ParameterError("cannot bind a scheme to an empty buffer");
    WeightScheme s = *this;
    s.buffer_size = size;
    s.min_coverage = std::min(min_coverage, size);
    return s;
}

std::string WeightScheme::describe() const {
    switch (kind) {
        case SchemeKind::Uniform:
        case SchemeKind::OneOverAge: return fmt::format("scheme={}", to_string(kind));
        case SchemeKind::PriorityBaseline:
            return fmt::format("scheme={} alpha={}", to_string(kind), priority_exponent);
        default:
            return fmt::format("scheme={} N0={} L0={} eta={} c_min={} K={}", to_string(kind),
                               buffer_size, max_horizon, eta, min_coverage,
                               updates_per_episode);
    }
}

double scheme_weight(const WeightScheme& scheme, std::int64_t age,
                     std::optional<double> priority) {
    if (age < 1) throw ParameterError("ages are 1-based");
    switch (scheme.kind) {
        case SchemeKind::Uniform: return 1.0;
        case SchemeKind::OneOverAge: return 1.0 / static_cast<double>(age);
        case SchemeKind::EREStaged: return ere_aggregate_oracle(scheme, age);
        case SchemeKind::EREExact: return ere_exact_weight(scheme, age);
        case SchemeKind::EREApprox: return ere_apx_weight(scheme, age);
        case SchemeKind::PriorityBaseline:
            if (!priority) throw ParameterError("priority scheme needs a per-entry priority");
            if (!(*priority >= 0.0)) throw ParameterError("priorities must be >= 0");
            return std::pow(*priority, scheme.priority_exponent);
    }
    throw ParameterError("unhandled scheme kind");
}

std::vector<double> weight_profile(const WeightScheme& scheme) {
    scheme.validate();
    if (scheme.kind == SchemeKind::PriorityBaseline)
        throw ParameterError("priority weights are not a function of age");
    if (scheme.kind == SchemeKind::EREStaged) return ere_aggregate_profile(scheme);
    std::vector<double> w(static_cast<std::size_t>(scheme.buffer_size));
    for (std::int64_t t = 1; t <= scheme.buffer_size; ++t)
        w[static_cast<std::size_t>(t - 1)] = scheme_weight(scheme, t);
    return w;
}

std::vector<double> normalize(std::span<const double> weights) {
    double total = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0) || !std::isfinite(w))
            throw ParameterError("weights must be finite and non-negative");
        total += w;
    }
    if (!(total > 0.0)) throw ParameterError("cannot normalize a zero-mass weight vector");
    std::vector<double> out(weights.begin(), weights.end());
    for (double& w : out) w /= total;
    return out;
}

}  // namespace replaylab::weighting
