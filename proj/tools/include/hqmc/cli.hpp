#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hqmc::cli {

/// Exit codes of every command.
enum ExitCode : int {
    kSuccess = 0,
    /// Invalid model, or not equivalent.
    kNegative = 1,
    /// Usage, parse or I/O error.
    kError = 2,
};

/// Runs one command. args excludes the program name. Primary output goes to
/// out unless --output names a file; diagnostics go to err.
int run(std::vector<std::string> const& args, std::ostream& out, std::ostream& err);

}  // namespace hqmc::cli
