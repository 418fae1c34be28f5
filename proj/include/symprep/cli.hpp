#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace symprep::cli {

enum ExitCode : int {
    kOk = 0,
    kIoError = 1,              ///< unreadable file, malformed JSON, schema violation
    kPreconditionFailure = 2,  ///< input violates a hypothesis of the construction
    kVerificationFailure = 3,  ///< computed residual or discrepancy above tolerance
};

/// Relative tolerance: SYMPREP_TOL if set, otherwise `fallback`.
/// Throws std::invalid_argument on an unparsable or non-positive value.
double tolerance_from_env(double fallback);

/// Runs one subcommand. `args[0]` is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace symprep::cli
