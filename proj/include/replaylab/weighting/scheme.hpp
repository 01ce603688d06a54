#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace replaylab::weighting {

enum class SchemeKind {
    Uniform,
    OneOverAge,
    EREStaged,
    EREExact,
    EREApprox,
    PriorityBaseline,
};

std::string_view to_string(SchemeKind kind);

/// Parses the CLI spelling: uniform, one-over-age, ere-staged, ere-exact,
/// ere-approx, priority. Throws ParameterError on anything else.
SchemeKind parse_scheme_kind(std::string_view name);

bool is_ere(SchemeKind kind);

/**
 * A sampling strategy together with its parameters.
 *
 * The ERE fields describe a buffer of `buffer_size` entries (N0) that is
 * sampled `updates_per_episode` times (K); stage k draws uniformly from the
 * newest c_k = max(N0 * eta^(k * max_horizon / K), min_coverage) entries.
 * Ages are 1-based: the newest entry has age 1.
 */
struct WeightScheme {
    SchemeKind kind{SchemeKind::Uniform};
    std::int64_t buffer_size{1'000'000};
    std::int64_t max_horizon{1000};
    double eta{0.996};
    std::int64_t min_coverage{5000};
    std::int64_t updates_per_episode{1000};
    double priority_exponent{1.0};

    static WeightScheme uniform();
    static WeightScheme one_over_age();
    static WeightScheme ere(SchemeKind kind, std::int64_t buffer_size, std::int64_t max_horizon,
                            double eta, std::int64_t min_coverage,
                            std::int64_t updates_per_episode);
    static WeightScheme priority(double exponent);

    /// Throws ParameterError when a field relevant to `kind` is out of domain.
    void validate() const;

    /// The scheme as applied to a buffer currently holding `size` entries:
    /// N0 becomes `size` and c_min is capped at `size`.
    WeightScheme bound_to(std::int64_t size) const;

    /// Compact key=value rendering used in provenance headers.
    std::string describe() const;
};

/// Unnormalized weight of an entry of the given age under `scheme`.
/// `priority` is required for PriorityBaseline and ignored otherwise.
double scheme_weight(const WeightScheme& scheme, std::int64_t age,
                     std::optional<double> priority = std::nullopt);

/// Weights for ages 1..scheme.buffer_size (index = age - 1).
std::vector<double> weight_profile(const WeightScheme& scheme);

/// w / sum(w). Throws ParameterError on negative entries or zero mass.
std::vector<double> normalize(std::span<const double> weights);

}  // namespace replaylab::weighting
