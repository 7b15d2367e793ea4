#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace hfl::cli {

// exit codes
inline constexpr int kAccepted = 0, kRejected = 1, kUnknown = 2, kUsage = 3;

// Runs `hfl <args...>` (args excludes the program name). Reports go to out as
// `key: value` lines; usage and IO errors go to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hfl::cli
