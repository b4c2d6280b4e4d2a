#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace twj::cli {

inline constexpr const char* schema_version = "1.0";

// Runs the command line `args` (without the program name). Returns the process exit code:
// 0 on success, 2 on validation failure, 3 on numerical failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Directory holding the cached Tracy-Widom table (TWJ_CACHE_DIR overrides the default).
std::string cache_directory();

}  // namespace twj::cli
