#pragma once

#include <iosfwd>

namespace salientcut {

/// Exit statuses of the command-line driver.
enum ExitCode : int {
  kExitOk = 0,
  kExitBadArgs = 1,
  kExitIo = 2,
  kExitEmptyInput = 3,
};

/// Entry point of the `salientcut` tool: gen | saliency | segment | eval | bench.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace salientcut
