#pragma once

#include <string>
#include <vector>

namespace hsrc::cli {

// Dispatches the subcommands encode, decode, repair, pairs, resilience,
// bandwidth, schedule. Returns 0 on success, 1 on domain failure
// (unrecoverable / irreparable / infeasible), 2 on usage or malformed-file
// errors. Diagnostics go to stderr.
int run(int argc, const char* const* argv);

// Convenience for in-process use; args exclude the program name.
int run(const std::vector<std::string>& args);

}  // namespace hsrc::cli
