#pragma once

#include <iosfwd>

namespace l1hr {

// Entry point of the `l1hr` command-line tool (subcommands simulate, sweep,
// crlb, decompose). Returns the process exit code.
int runCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// Environment variable naming the directory for `sweep` output when
// --output is not given.
inline constexpr const char* kOutputDirEnv = "L1HR_OUTPUT_DIR";

}  // namespace l1hr
