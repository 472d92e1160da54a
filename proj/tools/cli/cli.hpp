#pragma once

// Command dispatch for the `crowdsense` tool, kept out of main() so tests can
// drive it in-process.

#include <iosfwd>
#include <string>
#include <vector>

namespace crowdsense::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;       // bad flags, bad input, bad data
inline constexpr int kExitNotConverged = 2;  // only with --strict

// `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace crowdsense::cli
