#pragma once

#include "replaylab/weighting/scheme.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace replaylab::cli {

/// Every parameter of every subcommand. Unset optionals fall back to the
/// subcommand's own defaults.
struct RunConfig {
    // sampling scheme
    std::string scheme{"uniform"};
    std::optional<std::int64_t> buffer_size;
    std::optional<std::int64_t> max_horizon;
    std::optional<double> eta;
    std::optional<std::int64_t> min_coverage;
    std::optional<std::int64_t> updates_per_episode;
    double priority_exponent{1.0};

    std::uint64_t seed{1};
    std::string output{"-"};

    // profile
    std::int64_t profile_horizon{1000};
    std::int64_t batch{1};
    std::int64_t updates{1};
    std::int64_t mc_trials{0};

    // bound
    double r_max{1.0};
    double gamma{0.9};
    double lipschitz{0.0};
    double diam{0.0};
    double delta{0.05};
    std::int64_t bound_episodes{100};
    std::int64_t step{0};
    std::string bound_horizon{"inf"};
    double bellman_err{0.0};
    double w1_err{0.0};
    std::string weights{"none"};

    // train
    std::string env{"chain"};
    std::int64_t episodes{200};
    std::int64_t traj_len{40};
    std::int64_t batches{50};
    std::int64_t batch_size{64};
    double learning_rate{0.5};
    double tau_initial{1.0};
    double tau_min{0.05};
    double tau_decay{0.9};
    std::int64_t eval_step{0};
    std::int64_t eval_horizon{0};
    bool exact_fit{false};
    bool weighted_bound{false};
    std::int64_t seeds{1};
    unsigned workers{0};

    // verify
    std::vector<std::string> suites;
    std::string inject_fault{"none"};
    bool list_suites{false};
};

/// Reads `key = value` lines ('#' starts a comment) into `--key=value`
/// arguments.
std::vector<std::string> config_file_arguments(const std::filesystem::path& path);

/// Removes `--config <file>` / `--config=<file>` from `args` and splices the
/// file's arguments directly after the subcommand name, ahead of the
/// explicit flags so that the flags win.
std::vector<std::string> expand_config(std::vector<std::string> args);

/// Shortest text that reads back to the same double.
std::string format_number(double value);

}  // namespace replaylab::cli
