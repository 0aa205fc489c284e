#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace imtriage::cli {

enum ExitCode : int {
  kOk = 0,
  kEvidenceError = 1,
  kUsageError = 2,
  kIntegrityFailure = 3,
};

// args excludes the program name. Reports go to out, diagnostics to err.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace imtriage::cli
