#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gebridge::cli {

/// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kInternalError = 1;
inline constexpr int kUsageError = 2;
inline constexpr int kStrictFailure = 3;

/// Runs one command line. `args` excludes the program name, e.g.
/// {"params", "--rho", "0.5"}. Data goes to `out` unless --output is given;
/// diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gebridge::cli
