#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "modalpf/errors.hpp"

namespace modalpf::cli {

/// Bad flag combinations; exit code 3.
class UsageError : public Error {
 public:
  using Error::Error;
};

/// Runs `modalpf <args...>` and returns the process exit code:
/// 0 success, 1 I/O or schema error, 2 mathematical degeneracy, 3 usage.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace modalpf::cli
