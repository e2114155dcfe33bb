#ifndef QTLAB_TOOLS_COMMANDS_HPP
#define QTLAB_TOOLS_COMMANDS_HPP

#include <string>
#include <vector>

#include "run_config.hpp"

namespace qtlab::cli {

enum ExitCode : int { kPass = 0, kCheckFail = 1, kConfigError = 2, kNumericError = 3 };

const std::vector<std::string>& command_names();

/// Runs one command against a parsed config, writing into cfg.out_dir.
/// Returns kPass or kCheckFail; module errors propagate as exceptions.
int run_command(const std::string& name, const RunConfig& cfg);

} // namespace qtlab::cli

#endif
