#pragma once

#include <iosfwd>

namespace hfslock::cli {

/// Exit status contract of the command-line tool.
enum ExitCode : int { success = 0, validation_error = 1, numerical_failure = 2 };

/// Parses `argv` and runs one subcommand (synth, fit, predict, classify,
/// linearize, lock, mg-offset). Diagnostics go to `err`, JSON sent to
/// `--out -` goes to `out`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hfslock::cli
