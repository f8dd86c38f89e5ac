#pragma once

#include <iosfwd>

namespace nanoplate {

/// Exit codes of the command line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitValidation = 2,
  kExitNumeric = 3,
  kExitUsage = 64,
};

/// Entry point of `nanoplate <subcommand> [--config PATH] [--out DIR] [--seed N] ...`.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace nanoplate
