#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace srrc::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Runs one command. `args` excludes the program name. Diagnostics go to `out`
/// as key=value lines, errors and warnings to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace srrc::cli
