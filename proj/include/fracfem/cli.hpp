#pragma once

#include <iosfwd>

namespace fracfem {

/// Exit codes of the command-line front end.
enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitValidation = 2, kExitNumerical = 3 };

/// Runs `fracfem <meshgen|solve|converge> ...`; returns an ExitCode.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fracfem
