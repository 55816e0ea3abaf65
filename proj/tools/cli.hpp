#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace srskit::cli {

enum ExitCode : int {
  kOk = 0,
  kUsageError = 1,
  kDataError = 2,
  kBudgetExhausted = 3,
};

/// Runs one invocation. argv[0] is the program name. Errors are reported on
/// `err` as a single JSON line.
int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);

}  // namespace srskit::cli
