#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace routepack::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitInternal = 3;

/// Runs one command line (without the program name). Exit codes: 0 success,
/// 2 usage or validation error, 3 internal pipeline failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace routepack::cli
