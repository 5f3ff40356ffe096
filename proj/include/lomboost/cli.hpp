#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lomboost::cli {

/// Exit codes: 0 success, 1 data or domain error, 2 bad command line.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Runs one command. `args` excludes the program name. Results go to `out`,
/// diagnostics and usage text to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lomboost::cli
