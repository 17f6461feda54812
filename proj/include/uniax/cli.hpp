#pragma once

#include <iosfwd>

namespace uniax {

/// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

/// Runs the `uniax` command line. Human output goes to `out`, diagnostics to
/// `err`; the return value is the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace uniax
