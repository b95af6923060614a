#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fsyn::cli {

enum ExitCode : int {
  kOk = 0,
  kBadArguments = 2,
  kNumericFailure = 3,
  kBadInputFile = 4,
  kThresholdExceeded = 5,
};

/// Runs the command line `args` (args[0] is the program name) and returns the
/// process exit code. Diagnostics go to `err`, summaries to `out`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Angle in radians from "1.5", "90deg", "pi", "pi/2", "3pi/4", "-pi/2".
double parse_angle(const std::string& text);

/// "lo:hi:n" (uniform), "v" (single value) or "a,b,c" (explicit list).
std::vector<double> parse_mesh(const std::string& text);

}  // namespace fsyn::cli
