#pragma once

#include <iosfwd>
#include <span>
#include <string>

#include "ragwb/error.hpp"

namespace ragwb::cli {

/// 0 success, 1 user error, 2 environment or endpoint error.
int exit_code_for(ErrorKind kind);

/// Runs the workbench. `args[0]` is the program name. Command output goes to
/// `out`, diagnostics to `err`, logs to stderr.
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace ragwb::cli
