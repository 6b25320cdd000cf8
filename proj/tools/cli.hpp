#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace dht::cli {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int { kOk = 0, kInputError = 2, kInvariantViolation = 3 };

/// Runs one command line (args[0] is the program name). Diagnostics go to
/// `err`, help text and short reports to `out`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dht::cli
