#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace trimix::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

/// Runs one command line; `args[0]` is the program name. Errors go to `err`
/// prefixed with "error:".
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Worker threads: TRIMIX_THREADS when set to a positive integer, else the
/// hardware concurrency (at least 1).
unsigned thread_budget();

}  // namespace trimix::cli
