#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace factest::cli {

/// Exit codes of the factest tool.
enum ExitCode : int {
  kOk = 0,          ///< a decision or table was produced
  kUsage = 1,       ///< bad flags, unreadable or malformed input
  kDegenerate = 2,  ///< input well formed but the test is vacuous on it
};

/// Environment variable consulted for the default seed; --seed wins.
inline constexpr const char* kSeedEnv = "FACTEST_SEED";

/// Runs the tool on `args` (args[0] is the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace factest::cli
