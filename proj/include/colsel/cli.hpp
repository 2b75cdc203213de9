#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace colsel::cli {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitFailed = 2;

/// Runs the `colsel` command line. `args` excludes the program name.
/// Writes reports to --output when given, otherwise to `out`; diagnostics
/// go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace colsel::cli
