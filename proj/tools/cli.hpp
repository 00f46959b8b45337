#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace leibenson::cli {

enum ExitCode : int {
  kPass = 0,
  kVerdictFailure = 1,
  kUsage = 2,
  kNumeric = 3,
};

/// Runs the command line `args` (without the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace leibenson::cli
