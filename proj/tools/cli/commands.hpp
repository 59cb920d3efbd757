#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace alphacross::cli {

enum ExitCode : int {
    kSuccess = 0,
    kInputError = 2,
    kDegenerate = 3,
};

/// Runs one CLI invocation. `args` excludes the program name. Results go to
/// `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace alphacross::cli
