#pragma once

#include "run_config.hpp"

#include <string>

namespace replaylab::cli {

/// Each builder returns the complete artifact, starting with the '#'
/// provenance line that reproduces it.
std::string profile_csv(const RunConfig& config);
std::string bound_report(const RunConfig& config);
std::string train_csv(const RunConfig& config);

/// Writes `text` to `path`, or to stdout for "-". Throws ParameterError when
/// the file cannot be written.
void write_output(const std::string& path, const std::string& text);

int cmd_profile(const RunConfig& config);
int cmd_bound(const RunConfig& config);
int cmd_train(const RunConfig& config);
/// 0 when every selected suite passes, 3 otherwise.
int cmd_verify(const RunConfig& config);

}  // namespace replaylab::cli
