#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qctx::cli {

enum ExitCode : int { ok = 0, property_failure = 1, usage_error = 2, io_error = 3 };

/// Runs the command line `args` (without the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qctx::cli
