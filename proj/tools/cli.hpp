#pragma once

#include <iosfwd>

namespace comblab::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kInternalError = 1;
inline constexpr int kValidationError = 2;
inline constexpr int kRunAborted = 3;  // window escape, budget exhausted

/// Parses argv (argv[0] is the program name), dispatches one subcommand and
/// prints its JSON report to `out`. Diagnostics go to `err`.
int run_command(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace comblab::cli
