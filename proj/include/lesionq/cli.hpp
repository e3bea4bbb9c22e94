#pragma once

#include <string>
#include <vector>

namespace lesionq::cli {

/// Exit codes: 0 success, 1 domain/invariant error, 2 I/O or format error.
enum ExitCode : int { kOk = 0, kDomainError = 1, kFormatError = 2 };

/// Runs the command line `args` (args[0] is the program name).
int run(const std::vector<std::string>& args);

}  // namespace lesionq::cli
