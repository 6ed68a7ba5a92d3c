#pragma once

// Command-line front end. Kept in the library so tests can drive it in-process.

#include <iosfwd>

namespace mcqn {

enum ExitCode : int {
    exit_ok = 0,
    exit_domain = 1,  ///< validation or domain failure
    exit_io = 2,      ///< I/O, parse or usage failure
    exit_budget = 3,  ///< a simulation exceeded its event budget
};

/// Runs `mcqn <command> [options]`. Results go to `out` unless --out is
/// given; diagnostics go to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mcqn
