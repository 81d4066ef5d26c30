#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ioshock::cli {

/// Process exit codes.
enum ExitCode : int {
  kOk = 0,
  kIdentityViolation = 1,
  kInputError = 2,  // structural, parse, configuration or I/O problems
  kNonProductive = 3,
  kInternalError = 4,
};

/// Runs one invocation. args excludes the program name. Summaries go to out,
/// diagnostics to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run_main(int argc, char** argv);

}  // namespace ioshock::cli
