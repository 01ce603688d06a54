#include "replaylab/errors.hpp"
#include "replaylab/verify/suites.hpp"
#include "replaylab/weighting/ere.hpp"

#include <gtest/gtest.h>

#include <algorithm>

using namespace replaylab;
using namespace replaylab::verify;

TEST(Verify, EverySuitePasses) {
    const auto results = run_suites({});
    ASSERT_EQ(results.size(), suite_names().size());
    for (const auto& r : results) {
        EXPECT_TRUE(r.passed) << r.name << ": " << r.detail;
        EXPECT_LE(r.residual, r.tolerance) << r.name;
    }
}

TEST(Verify, SuiteNames) {
    const auto& names = suite_names();
    for (const char* expected : {"ere-oracle", "flow-lemma", "wasserstein", "sampling-law", "prefix-sum"})
        EXPECT_NE(std::find(names.begin(), names.end(), expected), names.end()) << expected;
}

TEST(Verify, FilterRunsOnlyNamedSuites) {
    const auto results = run_suites({"flow-lemma"});
    ASSERT_EQ(results.size(), 1u);
    EXPECT_EQ(results[0].name, "flow-lemma");
    EXPECT_TRUE(results[0].passed);
}

TEST(Verify, UnknownSuiteThrows) {
    EXPECT_THROW(run_suite("no-such-suite"), ParameterError);
    EXPECT_THROW(run_suites({"hoeffding", "bogus"}), ParameterError);
}

TEST(Verify, BrokenApproximationIsCaught) {
    VerifyOptions opt;
    opt.ere_apx = [](const weighting::WeightScheme& s, std::int64_t age) {
        return weighting::ere_apx_weight(s, age) * (age % 2 ? 1.3 : 0.7);
    };
    EXPECT_FALSE(run_suite("ere-oracle", opt).passed);
    EXPECT_TRUE(run_suite("hoeffding", opt).passed);
}

TEST(Verify, ThrowingApproximationIsAFailureNotACrash) {
    VerifyOptions opt;
    opt.ere_apx = [](const weighting::WeightScheme&, std::int64_t) -> double {
        throw NumericalError("broken");
    };
    const auto r = run_suite("ere-oracle", opt);
    EXPECT_FALSE(r.passed);
    EXPECT_NE(r.detail.find("broken"), std::string::npos);
}
