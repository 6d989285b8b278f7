#pragma once

// Command-line front end. Exit codes: 0 all checks pass, 1 a check failed,
// 2 usage, I/O or schema error.

#include <ostream>
#include <string>
#include <vector>

namespace singspec::cli {

inline constexpr int kExitPass = 0;
inline constexpr int kExitCheckFailure = 1;
inline constexpr int kExitUsage = 2;

/// `args` excludes the program name. Reports go to `out` (or --out), diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace singspec::cli
