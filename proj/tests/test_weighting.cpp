#include "replaylab/errors.hpp"
#include "replaylab/weighting/ere.hpp"
#include "replaylab/weighting/scheme.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

using namespace replaylab;
using namespace replaylab::weighting;

namespace {

WeightScheme reference(SchemeKind kind, std::int64_t k = 1000) {
    return WeightScheme::ere(kind, 1'000'000, 1000, 0.996, 5000, k);
}

std::vector<double> profile_by(const WeightScheme& s, double (*fn)(const WeightScheme&, std::int64_t)) {
    std::vector<double> w(static_cast<std::size_t>(s.buffer_size));
    for (std::int64_t t = 1; t <= s.buffer_size; ++t) w[static_cast<std::size_t>(t - 1)] = fn(s, t);
    return w;
}

double l1_normalized(const std::vector<double>& a, const std::vector<double>& b) {
    const auto na = normalize(a), nb = normalize(b);
    double d = 0.0;
    for (std::size_t i = 0; i < na.size(); ++i) d += std::abs(na[i] - nb[i]);
    return d;
}

}  // namespace

TEST(Scheme, ParsesEveryCliSpelling) {
    for (auto kind : {SchemeKind::Uniform, SchemeKind::OneOverAge, SchemeKind::EREStaged, SchemeKind::EREExact,
                      SchemeKind::EREApprox, SchemeKind::PriorityBaseline})
        EXPECT_EQ(parse_scheme_kind(to_string(kind)), kind);
    EXPECT_THROW(parse_scheme_kind("per"), ParameterError);
}

TEST(Scheme, RejectsOutOfDomainParameters) {
    EXPECT_THROW(WeightScheme::ere(SchemeKind::EREStaged, 100, 10, 0.0, 5, 10), ParameterError);
    EXPECT_THROW(WeightScheme::ere(SchemeKind::EREStaged, 100, 10, 1.5, 5, 10), ParameterError);
    EXPECT_THROW(WeightScheme::ere(SchemeKind::EREStaged, 100, 10, 0.9, 0, 10), ParameterError);
    EXPECT_THROW(WeightScheme::ere(SchemeKind::EREStaged, 100, 10, 0.9, 101, 10), ParameterError);
    EXPECT_THROW(WeightScheme::priority(-1.0), ParameterError);
    EXPECT_NO_THROW(WeightScheme::ere(SchemeKind::EREStaged, 100, 10, 1.0, 5, 10));
}

TEST(Scheme, BoundToCapsMinCoverage) {
    const auto s = reference(SchemeKind::EREApprox).bound_to(300);
    EXPECT_EQ(s.buffer_size, 300);
    EXPECT_EQ(s.min_coverage, 300);
    EXPECT_THROW(reference(SchemeKind::EREApprox).bound_to(0), ParameterError);
}

TEST(SchemeWeight, Dispatch) {
    EXPECT_DOUBLE_EQ(scheme_weight(WeightScheme::one_over_age(), 4), 0.25);
    EXPECT_DOUBLE_EQ(scheme_weight(WeightScheme::uniform(), 12345), 1.0);
    EXPECT_DOUBLE_EQ(scheme_weight(WeightScheme::priority(1.0), 1, 2.0), 2.0);
    EXPECT_DOUBLE_EQ(scheme_weight(WeightScheme::priority(0.5), 1, 4.0), 2.0);
    EXPECT_THROW(scheme_weight(WeightScheme::priority(1.0), 1), ParameterError);
    EXPECT_THROW(scheme_weight(WeightScheme::one_over_age(), 0), ParameterError);
}

TEST(Normalize, SumsToOne) {
    std::vector<double> w{3.0, 1e-9, 17.5, 0.0, 2.25};
    const auto n = normalize(w);
    EXPECT_NEAR(std::accumulate(n.begin(), n.end(), 0.0), 1.0, 1e-12);
    EXPECT_THROW(normalize(std::vector<double>{1.0, -1.0}), ParameterError);
    EXPECT_THROW(normalize(std::vector<double>{0.0, 0.0}), ParameterError);
}

TEST(StageCoverage, EtaOneCoversWholeBuffer) {
    const auto s = WeightScheme::ere(SchemeKind::EREStaged, 10000, 1000, 1.0, 5000, 1000);
    for (std::int64_t k : {1, 500, 1000}) EXPECT_EQ(ere_stage_coverage(k, s), 10000);
}

TEST(StageCoverage, PinnedValues) {
    const auto s = WeightScheme::ere(SchemeKind::EREStaged, 10000, 1000, 0.996, 5000, 1000);
    // 10^4 * 0.996^100 = 6697.83 (mpmath); nearest integer.
    EXPECT_EQ(ere_stage_coverage(100, s), 6698);
    // 10^4 * 0.996^1000 = 181.7 < c_min.
    EXPECT_EQ(ere_stage_coverage(1000, s), 5000);
    EXPECT_THROW(ere_stage_coverage(0, s), ParameterError);
    EXPECT_THROW(ere_stage_coverage(1001, s), ParameterError);
}

TEST(StageCoverage, NonIncreasingAndClamped) {
    const auto s = reference(SchemeKind::EREStaged);
    const auto c = ere_stage_coverages(s);
    for (std::size_t k = 1; k < c.size(); ++k) EXPECT_LE(c[k], c[k - 1]);
    EXPECT_GE(c.back(), s.min_coverage);
    EXPECT_LE(c.front(), s.buffer_size);
}

TEST(AggregateOracle, AgesBeyondWidestStageGetNothing) {
    const auto s = WeightScheme::ere(SchemeKind::EREStaged, 10000, 1000, 0.996, 5000, 1000);
    const auto c1 = ere_stage_coverage(1, s);
    ASSERT_LT(c1, 10000);
    EXPECT_EQ(ere_aggregate_oracle(s, c1 + 1), 0.0);
    EXPECT_GT(ere_aggregate_oracle(s, c1), 0.0);
}

TEST(AggregateOracle, RecentAgesSeeEveryStage) {
    const auto s = reference(SchemeKind::EREStaged);
    double full = 0.0;
    for (auto c : ere_stage_coverages(s)) full += 1.0 / static_cast<double>(c);
    EXPECT_DOUBLE_EQ(ere_aggregate_oracle(s, 1), full);
    EXPECT_DOUBLE_EQ(ere_aggregate_oracle(s, 5000), full);
    // mpmath summation with nearest-integer c_k.
    EXPECT_NEAR(ere_aggregate_oracle(s, 1), 0.013509463916614155, 1e-15);
}

TEST(AggregateOracle, RegressionPinAtAgeHundredThousand) {
    // Direct summation in 40-digit arithmetic.
    EXPECT_NEAR(ere_aggregate_oracle(reference(SchemeKind::EREStaged), 100000), 0.0022450531347910425, 1e-16);
}

TEST(AggregateOracle, PrefixProfileMatchesDirectSum) {
    const auto s = WeightScheme::ere(SchemeKind::EREStaged, 2000, 50, 0.97, 120, 37);
    const auto fast = ere_aggregate_profile(s);
    for (std::int64_t t = 1; t <= s.buffer_size; ++t)
        EXPECT_NEAR(fast[static_cast<std::size_t>(t - 1)], ere_aggregate_oracle(s, t), 1e-15) << t;
}

TEST(ExactWeight, PlateauBelowLastStage) {
    const auto s = reference(SchemeKind::EREExact);
    const double w = ere_exact_weight(s, 1);
    for (std::int64_t t : {2, 100, 4999, 5000, 5001, 18000, 18169}) EXPECT_DOUBLE_EQ(ere_exact_weight(s, t), w) << t;
    EXPECT_LT(ere_exact_weight(s, 18171), w);
}

TEST(ExactWeight, PinnedValues) {
    const auto s = reference(SchemeKind::EREExact);
    EXPECT_NEAR(ere_exact_weight(s, 100000), 0.00225, 1e-17);
    EXPECT_NEAR(ere_exact_weight(s, 1), 0.01350946617620813, 1e-15);
}

TEST(ExactWeight, OldestEntryGetsZero) {
    EXPECT_EQ(ere_exact_weight(reference(SchemeKind::EREExact), 1'000'000), 0.0);
}

TEST(ExactWeight, DomainErrors) {
    auto s = reference(SchemeKind::EREExact);
    EXPECT_THROW(ere_exact_weight(s, 0), ParameterError);
    EXPECT_THROW(ere_exact_weight(s, 1'000'001), ParameterError);
    s.eta = 1.0;
    EXPECT_THROW(ere_exact_weight(s, 1), ParameterError);
    EXPECT_THROW(ere_apx_weight(s, 1), ParameterError);
}

class ExactVsStaged : public ::testing::TestWithParam<std::int64_t> {};

TEST_P(ExactVsStaged, NormalizedL1WithinFiveOverK) {
    const std::int64_t k = GetParam();
    const auto s = reference(SchemeKind::EREExact, k);
    const double l1 = l1_normalized(profile_by(s, ere_exact_weight), ere_aggregate_profile(s));
    EXPECT_LE(l1, 5.0 / static_cast<double>(k));
}

INSTANTIATE_TEST_SUITE_P(ReferenceConstants, ExactVsStaged, ::testing::Values(100, 1000, 10000));

TEST(ApproxWeight, LogTermVanishesAtReferenceConstants) {
    const auto s = reference(SchemeKind::EREApprox);
    // N0 eta^L0 = 18169.3 > c_min, so age 1 sits on the plateau 1/(N0 eta^L0) - 1/N0.
    EXPECT_NEAR(ere_apx_weight(s, 1), 5.4037864704832522e-5, 1e-18);
    EXPECT_NEAR(ere_apx_weight(s, 100000), 9e-6, 1e-19);
    EXPECT_DOUBLE_EQ(ere_apx_weight(s, 1), ere_apx_weight(s, 5000));
}

TEST(ApproxWeight, LogTermActiveForFastDecay) {
    const auto s = WeightScheme::ere(SchemeKind::EREApprox, 200'000, 1000, 0.99, 5000, 1000);
    EXPECT_NEAR(ere_apx_weight(s, 1), 0.001467291279877501, 1e-15);
    EXPECT_NEAR(ere_apx_weight(s, 5001), 0.00019496000799840031, 1e-17);
}

TEST(ApproxWeight, NonIncreasingInAge) {
    for (const auto& s : {reference(SchemeKind::EREApprox),
                          WeightScheme::ere(SchemeKind::EREApprox, 200'000, 1000, 0.99, 5000, 1000),
                          WeightScheme::ere(SchemeKind::EREApprox, 5000, 37, 0.9, 3, 11)}) {
        const auto w = profile_by(s, ere_apx_weight);
        for (std::size_t t = 1; t < w.size(); ++t) ASSERT_LE(w[t], w[t - 1]) << t;
        for (double x : w) ASSERT_GE(x, 0.0);
    }
}

TEST(ApproxWeight, UniformLimitNearEtaOne) {
    const double eta = std::pow(1.0 - 1e-6, 1.0 / 1000.0);
    const auto s = WeightScheme::ere(SchemeKind::EREApprox, 1'000'000, 1000, eta, 5000, 1000);
    const double span = 1e6 * std::pow(eta, 1000.0);
    ASSERT_GE(span, 1e6 * (1 - 1e-6) - 1e-6);
    double lo = 1e300, hi = 0.0;
    for (std::int64_t t = 1; t <= static_cast<std::int64_t>(span); t += 997) {
        lo = std::min(lo, ere_apx_weight(s, t));
        hi = std::max(hi, ere_apx_weight(s, t));
    }
    EXPECT_LE((hi - lo) / hi, 1e-6);
}

TEST(ApproxWeight, MatchesExactAfterNormalization) {
    for (const auto& s : {reference(SchemeKind::EREApprox),
                          WeightScheme::ere(SchemeKind::EREApprox, 200'000, 1000, 0.99, 5000, 1000)}) {
        const auto a = normalize(profile_by(s, ere_apx_weight));
        const auto e = normalize(profile_by(s, ere_exact_weight));
        double worst = 0.0;
        for (std::size_t t = 0; t < e.size(); ++t)
            if (e[t] > 0.0) worst = std::max(worst, std::abs(a[t] - e[t]) / e[t]);
        EXPECT_LE(worst, 0.02);
    }
}

TEST(WeightProfile, EveryKindIsNonNegative) {
    for (auto kind : {SchemeKind::EREStaged, SchemeKind::EREExact, SchemeKind::EREApprox}) {
        const auto w = weight_profile(WeightScheme::ere(kind, 3000, 40, 0.95, 20, 25));
        for (double x : w) ASSERT_GE(x, 0.0);
    }
    EXPECT_THROW(weight_profile(WeightScheme::priority(1.0)), ParameterError);
}
