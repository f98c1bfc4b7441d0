#pragma once

#include "unistitch/error.hpp"

namespace unistitch::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 2,
  kIo = 3,
  kBackend = 4,
  kPipeline = 5,
};

int exit_code_for(ErrorCode code) noexcept;

/// Entry point of the `unistitch` binary; never throws.
int run(int argc, char** argv);

}  // namespace unistitch::cli
