#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace secrelay::cli {

enum ExitCode : int { kOk = 0, kFailure = 1, kInputError = 2 };

/// Runs one command line. `args` excludes the program name. Text output
/// without --out goes to `out`; diagnostics and warnings go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run(int argc, char** argv);

}  // namespace secrelay::cli
