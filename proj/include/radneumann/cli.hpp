#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace radneumann::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumerical = 3;
inline constexpr int kExitUsage = 64;

/// Entry point of the `radneumann` tool; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace radneumann::cli
