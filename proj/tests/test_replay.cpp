#include "replaylab/errors.hpp"
#include "replaylab/replay/replay_buffer.hpp"
#include "replaylab/replay/selection_sim.hpp"
#include "replaylab/replay/weight_index.hpp"
#include "replaylab/weighting/ere.hpp"

#include <gtest/gtest.h>

#include <numeric>

using namespace replaylab;
using namespace replaylab::replay;
using weighting::SchemeKind;
using weighting::WeightScheme;

namespace {

Transition at_time(std::int64_t g) {
    Transition t;
    t.global_time = g;
    t.state = static_cast<std::int32_t>(g % 7);
    return t;
}

ReplayBuffer filled(std::int64_t n, std::optional<std::size_t> cap = std::nullopt) {
    ReplayBuffer b(cap);
    for (std::int64_t g = 1; g <= n; ++g) b.push(at_time(g));
    return b;
}

}  // namespace

TEST(WeightIndex, PrefixSumsAndLookup) {
    const std::vector<double> w{0.5, 0.0, 2.0, 1.5, 0.0};
    WeightIndex idx(w);
    EXPECT_DOUBLE_EQ(idx.total(), 4.0);
    EXPECT_DOUBLE_EQ(idx.prefix(3), 2.5);
    EXPECT_EQ(idx.find(0.0), 0u);
    EXPECT_EQ(idx.find(0.49), 0u);
    EXPECT_EQ(idx.find(0.5), 2u);  // zero-weight entry 1 is skipped
    EXPECT_EQ(idx.find(2.49), 2u);
    EXPECT_EQ(idx.find(2.5), 3u);
    EXPECT_EQ(idx.find(3.999), 3u);
    EXPECT_EQ(idx.find(4.0), 3u);  // round-off beyond the total lands on the last positive entry
}

TEST(WeightIndex, PointUpdate) {
    WeightIndex idx(std::vector<double>{1, 1, 1, 1, 1, 1, 1});
    idx.set(4, 10.0);
    EXPECT_DOUBLE_EQ(idx.total(), 16.0);
    EXPECT_DOUBLE_EQ(idx.prefix(5), 14.0);
    EXPECT_EQ(idx.find(5.0), 4u);
    EXPECT_THROW(idx.set(0, -1.0), ParameterError);
    EXPECT_THROW(WeightIndex(std::vector<double>{1.0, std::nan("")}), ParameterError);
}

TEST(WeightIndex, ExhaustiveIntervalsForEverySize) {
    for (std::size_t n = 1; n <= 16; ++n) {
        std::vector<double> w(n);
        for (std::size_t i = 0; i < n; ++i) w[i] = (i % 3 == 1) ? 0.0 : 1.0 + static_cast<double>(i * i % 5);
        WeightIndex idx(w);
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            EXPECT_NEAR(idx.prefix(i), acc, 1e-12);
            if (w[i] > 0.0) {
                EXPECT_EQ(idx.find(acc + 0.5 * w[i]), i);
            }
            acc += w[i];
        }
    }
}

TEST(ReplayBuffer, PushBasics) {
    ReplayBuffer b;
    b.push(at_time(1));
    EXPECT_EQ(b.size(), 1u);
    EXPECT_EQ(b.newest_time(), 1);
}

TEST(ReplayBuffer, FifoEviction) {
    auto b = filled(3, 2);
    ASSERT_EQ(b.size(), 2u);
    EXPECT_EQ(b[0].global_time, 2);
    EXPECT_EQ(b[1].global_time, 3);
}

TEST(ReplayBuffer, RejectsOutOfOrderTimes) {
    auto b = filled(7);
    EXPECT_THROW(b.push(at_time(5)), OrderingError);
    EXPECT_THROW(b.push(at_time(7)), OrderingError);
    EXPECT_THROW(b.push(at_time(9)), OrderingError);
    ReplayBuffer fresh;
    EXPECT_THROW(fresh.push(at_time(0)), OrderingError);
    EXPECT_THROW(ReplayBuffer(std::optional<std::size_t>(0)), ParameterError);
}

TEST(ReplayBuffer, UniformWeightsAreEqual) {
    auto b = filled(9);
    b.reweight(WeightScheme::uniform(), 9);
    for (double w : b.weights()) EXPECT_EQ(w, 1.0);
}

TEST(ReplayBuffer, OneOverAgeWeights) {
    auto b = filled(3);
    b.reweight(WeightScheme::one_over_age(), 3);
    const auto w = b.weights();
    EXPECT_DOUBLE_EQ(w[0], 1.0 / 3.0);
    EXPECT_DOUBLE_EQ(w[1], 0.5);
    EXPECT_DOUBLE_EQ(w[2], 1.0);
}

TEST(ReplayBuffer, LaterReweightTimeAgesEverything) {
    auto b = filled(3);
    b.reweight(WeightScheme::one_over_age(), 5);
    EXPECT_DOUBLE_EQ(b.weights()[2], 1.0 / 3.0);
    EXPECT_THROW(b.reweight(WeightScheme::one_over_age(), 2), ParameterError);
}

TEST(ReplayBuffer, EreApproxMatchesClosedFormAtReferenceConstants) {
    const auto scheme = WeightScheme::ere(SchemeKind::EREApprox, 1'000'000, 1000, 0.996, 5000, 1000);
    auto b = filled(1'000'000);
    b.reweight(scheme, 1'000'000);
    const auto w = b.weights();
    for (std::int64_t age : {1, 2, 5000, 18169, 18170, 18171, 123456, 999999, 1000000})
        EXPECT_DOUBLE_EQ(w[static_cast<std::size_t>(1'000'000 - age)], weighting::ere_apx_weight(scheme, age)) << age;
}

TEST(ReplayBuffer, EreWindowTracksBufferSize) {
    const auto scheme = WeightScheme::ere(SchemeKind::EREApprox, 1'000'000, 1000, 0.996, 5000, 1000);
    auto b = filled(20'000);
    b.reweight(scheme, 20'000);
    const auto bound = scheme.bound_to(20'000);
    for (std::int64_t age : {1, 4999, 5000, 5001, 19999, 20000})
        EXPECT_DOUBLE_EQ(b.weights()[static_cast<std::size_t>(20'000 - age)], weighting::ere_apx_weight(bound, age));
}

TEST(ReplayBuffer, ReweightRejectsBadSchemes) {
    auto b = filled(4);
    auto s = WeightScheme::ere(SchemeKind::EREApprox, 100, 10, 0.9, 5, 10);
    s.eta = 1.2;
    EXPECT_THROW(b.reweight(s, 4), ParameterError);
    s.eta = 0.9;
    s.min_coverage = 0;
    EXPECT_THROW(b.reweight(s, 4), ParameterError);
    ReplayBuffer empty;
    EXPECT_THROW(empty.reweight(WeightScheme::uniform(), 1), SamplingError);
}

TEST(ReplayBuffer, DegenerateDistribution) {
    auto b = filled(6);
    b.reweight(WeightScheme::priority(1.0), 6);
    for (std::size_t i = 0; i < b.size(); ++i) b.set_priority(i, i == 3 ? 1.0 : 0.0);
    for (auto i : b.sample_batch(500, 42)) ASSERT_EQ(i, 3u);
}

TEST(ReplayBuffer, SamplingErrors) {
    ReplayBuffer empty;
    EXPECT_THROW(empty.sample_batch(1, 1), SamplingError);
    auto b = filled(3);
    b.reweight(WeightScheme::priority(1.0), 3);
    for (std::size_t i = 0; i < 3; ++i) b.set_priority(i, 0.0);
    EXPECT_THROW(b.sample_batch(1, 1), SamplingError);
}

TEST(ReplayBuffer, UniformFrequencies) {
    auto b = filled(4);
    b.reweight(WeightScheme::uniform(), 4);
    const std::size_t n = 100'000;
    std::vector<double> count(4, 0.0);
    for (auto i : b.sample_batch(n, 7)) count[i] += 1.0;
    double chi2 = 0.0;
    for (double c : count) {
        EXPECT_NEAR(c / n, 0.25, 0.01);
        chi2 += (c - n / 4.0) * (c - n / 4.0) / (n / 4.0);
    }
    EXPECT_LT(chi2, 16.27);  // 0.999 quantile, 3 degrees of freedom
}

TEST(ReplayBuffer, SameSeedSameIndices) {
    auto b = filled(100);
    b.reweight(WeightScheme::one_over_age(), 100);
    EXPECT_EQ(b.sample_batch(256, 99), b.sample_batch(256, 99));
    EXPECT_NE(b.sample_batch(256, 99), b.sample_batch(256, 100));
}

TEST(ReplayBuffer, PushMakesIndexStaleUntilRefresh) {
    auto b = filled(5);
    b.reweight(WeightScheme::one_over_age(), 5);
    EXPECT_FALSE(b.stale());
    b.push(at_time(6));
    EXPECT_TRUE(b.stale());
    EXPECT_THROW(b.sampler(), SamplingError);
    b.refresh();
    ASSERT_EQ(b.sampler().size(), 6u);
    EXPECT_DOUBLE_EQ(b.weights()[5], 1.0);
    EXPECT_DOUBLE_EQ(b.weights()[0], 1.0 / 6.0);
}

TEST(ReplayBuffer, EvictionKeepsAgesRelativeToNewest) {
    auto b = filled(10, 4);
    b.reweight(WeightScheme::one_over_age(), 10);
    const auto w = b.weights();
    ASSERT_EQ(w.size(), 4u);
    EXPECT_DOUBLE_EQ(w[0], 0.25);
    EXPECT_DOUBLE_EQ(w[3], 1.0);
    double total = std::accumulate(w.begin(), w.end(), 0.0);
    EXPECT_NEAR(b.sampler().total(), total, 1e-12);
}

TEST(ReplayBuffer, NewEntriesStartAtMaxPriority) {
    auto b = filled(2);
    b.reweight(WeightScheme::priority(1.0), 2);
    b.set_priority(0, 5.0);
    b.push(at_time(3));
    EXPECT_DOUBLE_EQ(b.priority(2), 5.0);
    EXPECT_NEAR(b.probability(2), 5.0 / 11.0, 1e-15);
}

TEST(UnitUniform, RangeAndReproducibility) {
    std::mt19937_64 a(3), c(3);
    for (int k = 0; k < 10000; ++k) {
        const double x = unit_uniform(a);
        ASSERT_GE(x, 0.0);
        ASSERT_LT(x, 1.0);
        ASSERT_EQ(x, unit_uniform(c));
    }
}

TEST(MonteCarloProfile, CountsAddUpAndRepeat) {
    const auto s = WeightScheme::one_over_age();
    const auto a = monte_carlo_selection_profile(s, 50, 3, 2, 20, 11);
    const auto b = monte_carlo_selection_profile(s, 50, 3, 2, 20, 11);
    EXPECT_EQ(a.mean_count, b.mean_count);
    EXPECT_NEAR(std::accumulate(a.mean_count.begin(), a.mean_count.end(), 0.0), 50.0 * 6, 1e-9);
    EXPECT_THROW(monte_carlo_selection_profile(WeightScheme::priority(1.0), 5, 1, 1, 1, 1), ParameterError);
}
