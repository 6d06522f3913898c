#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "trafficlens/error.hpp"

namespace trafficlens {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitConfig = 2,
  kExitInput = 3,
  kExitBackend = 4,
};

int exit_code_for(ErrorKind kind);

/// Entry point behind the `trafficlens` binary. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace trafficlens
