#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace replaylab::analysis {

/// Constants entering the evaluation-error bounds.
struct BoundInputs {
    double r_max{1.0};
    double gamma{0.9};
    double lipschitz{0.0};   // L_A
    double diam{0.0};        // diameter of the action set
    double delta{0.05};
    std::int64_t episodes{1};
    std::int64_t step{0};                  // i
    std::optional<std::int64_t> horizon;   // L; nullopt is an infinite horizon
    double bellman_err{0.0};               // eps_Q at (i, L)
    double w1_err{0.0};                    // W1 at (i, L)
    std::optional<std::vector<double>> episode_weights;

    /// Throws ParameterError on any out-of-domain field.
    void validate() const;
};

/// Additive pieces of a bound; total is their sum.
struct BoundTerms {
    double variance_initial{0.0};
    double variance_middle{0.0};
    double truncation{0.0};
    double bellman{0.0};
    double mismatch{0.0};
    double total{0.0};
};

/// sqrt(sum w^2) / sum w. Requires a non-empty vector of positive weights.
double hoeffding_error(std::span<const double> weights);

/// Width of the weighted martingale deviation with per-term range `range`:
/// range * sqrt(2 * sum w^2 * ln(1/delta)) / sum w.
double azuma_weighted_error(std::span<const double> weights, double range, double delta);

/// Infinite horizon, step 0, unweighted episodes.
BoundTerms theorem1_terms(const BoundInputs& in);
/// Finite horizon L and step i; adds gamma^(L-i) to the middle factor.
BoundTerms corollary1_terms(const BoundInputs& in);
/// Weighted episodes: 1/N becomes sum w^2 / (sum w)^2 in both square roots.
BoundTerms corollary2_weighted_terms(const BoundInputs& in);

double theorem1_rhs(const BoundInputs& in);
double corollary1_rhs(const BoundInputs& in);
double corollary2_weighted_rhs(const BoundInputs& in);

/// corollary2 when weights are present, corollary1 otherwise.
BoundTerms bound_terms(const BoundInputs& in);

}  // namespace replaylab::analysis
