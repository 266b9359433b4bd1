#pragma once

#include <string>
#include <vector>

namespace dwid::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitIo = 2;

/// Runs the command line; args excludes the program name. Returns the exit code.
int run(const std::vector<std::string>& args);

} // namespace dwid::cli
