#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace spinshot {

enum ExitCode : int { exit_ok = 0, exit_usage = 1, exit_config = 2, exit_numerical = 3 };

// Runs one command line (args excludes the program name). Normal output goes
// to out, diagnostics to err.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int dispatch(int argc, const char* const* argv);

}  // namespace spinshot
