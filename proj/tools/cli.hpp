#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rigidlab::cli {

/// Exit codes: 0 pass, 2 verdict failed, 1 error, 64 usage.
enum ExitCode { kPass = 0, kError = 1, kVerdictFail = 2, kUsage = 64 };

/// `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rigidlab::cli
