#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace xbn::cli {

/// Exit codes: 0 success, 1 usage error (bad flags, unknown names, missing
/// file), 2 computation error (parse/validation failure, impossible
/// evidence, degenerate explanation, guard exceeded).
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitComputation = 2;

/// Runs one invocation. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace xbn::cli
