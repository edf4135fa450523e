#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "coresel/error.hpp"

namespace coresel::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitIo = 3,
  kExitConstraint = 4,
};

/// Exit code for a library error.
int exit_code_for(ErrorCode code);

/// Runs one subcommand (synth, select, huq, toy, bench). Diagnostics go to
/// `err`; `out` receives a single JSON status line.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace coresel::cli
