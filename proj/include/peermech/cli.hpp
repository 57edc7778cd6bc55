#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace peermech::cli {

enum ExitCode : int { ok = 0, domain_error = 1, guard_exceeded = 2, usage_error = 3 };

/// Runs one invocation; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace peermech::cli
