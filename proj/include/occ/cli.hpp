#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace occ {

/// Stable process exit codes.
enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitData = 2, kExitNumerical = 3 };

/// Entry point of the `occ` tool. `args` excludes the program name. Normal
/// output goes to `out`, `phase=` log lines and diagnostics to `log`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& log);

}  // namespace occ
