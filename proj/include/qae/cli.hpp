// Command-line front end: toy, trajectory, crb, simulate, schedule-map.
//
// Every flag may also come from a JSON object passed with --config; flags
// given on the command line win. The effective configuration (defaults
// resolved) is printed to stderr as one JSON line and can be fed back
// through --config.
//
// Exit status: 0 success, 2 usage error, 3 runtime error.

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qae::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitRuntime = 3;

int run(int argc, char** argv);

// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qae::cli
