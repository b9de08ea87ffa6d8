#pragma once

#include <string>
#include <vector>

namespace hsfuse::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitIo = 3;
inline constexpr int kExitNumerical = 4;

/// Runs one command line (args[0] is the program name) and returns the process exit code.
int run(const std::vector<std::string>& args);

}  // namespace hsfuse::cli
