#pragma once

#include <string>
#include <vector>

namespace stol::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDataError = 2;
inline constexpr int kExitIterationCap = 3;

// Entry point for `stol <subcommand> ...`. args excludes the program name.
// Returns the process exit code; diagnostics go to stderr.
int run(const std::vector<std::string>& args);

}  // namespace stol::cli
