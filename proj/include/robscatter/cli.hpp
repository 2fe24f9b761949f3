#pragma once

#include <iosfwd>

namespace robscatter {

/// Process exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitUsage = 2, kExitData = 3, kExitEstimation = 4 };

/// Entry point of the `robscatter` tool; reports go to `out` unless an
/// output file is configured, diagnostics to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace robscatter
