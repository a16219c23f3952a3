#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sdiss::app {

inline constexpr const char* version = "0.1.0";

// Exit codes
inline constexpr int exit_ok = 0;
inline constexpr int exit_config = 2;
inline constexpr int exit_numerical = 3;

// Runs the CLI on args (args[0] is the program name). Diagnostics go to err,
// progress lines to out.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sdiss::app
