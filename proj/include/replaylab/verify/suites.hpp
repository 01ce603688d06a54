#pragma once

#include "replaylab/weighting/scheme.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace replaylab::verify {

struct SuiteResult {
    std::string name;
    bool passed{false};
    /// Worst observed value of the suite's checked quantity.
    double residual{0.0};
    double tolerance{0.0};
    std::string detail;
    double seconds{0.0};
};

struct VerifyOptions {
    std::uint64_t seed{20240611};
    /// Approximate ERE weight under test; replaceable to check that the
    /// ERE suite catches a broken formula.
    std::function<double(const weighting::WeightScheme&, std::int64_t)> ere_apx;

    VerifyOptions();
};

/// Names accepted by run_suite, in execution order.
const std::vector<std::string>& suite_names();

/// Throws ParameterError for an unknown name.
SuiteResult run_suite(const std::string& name, const VerifyOptions& options = {});

/// Runs `names`, or every suite when empty.
std::vector<SuiteResult> run_suites(const std::vector<std::string>& names,
                                    const VerifyOptions& options = {});

}  // namespace replaylab::verify
