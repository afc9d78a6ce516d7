// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace qalign {

enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 1,
    kExitRuntime = 2,
};

/// Entry point of the `qalign` tool. `args` excludes the program name.
/// Machine-readable output goes to `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qalign
