#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace phmm::cli {

/// Exit statuses. Failures also print exactly one stderr line:
///   phmm: error: <category>: <message>
enum ExitCode : int {
  kOk = 0,
  kInternalError = 1,
  kUsageError = 2,
  kInputError = 3,
  kDomainError = 4,
  kIoError = 5,
};

/// Runs one command. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace phmm::cli
