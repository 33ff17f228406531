#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace propcomp::cli {

/// Exit statuses.
inline constexpr int kOk = 0;
inline constexpr int kValidationError = 2;
inline constexpr int kSolverError = 3;

/// Runs one subcommand. `args` excludes the program name. Results go to the
/// --out file when given, else to `out`; diagnostics go to `err`.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace propcomp::cli
