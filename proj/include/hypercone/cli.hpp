#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hypercone {

/// Exit statuses of the command-line front end.
enum ExitCode : int { kExitOk = 0, kExitInput = 1, kExitFinding = 2, kExitBudget = 3 };

/// Runs the command line `args` (without the program name).  Reports go to
/// `out` unless --output is given; diagnostics go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hypercone
