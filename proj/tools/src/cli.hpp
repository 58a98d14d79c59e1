#pragma once

#include <string>
#include <vector>

namespace aupipe::cli {

// Entry point behind the `aupipe` binary; args exclude the program name.
// Exit codes: 0 success, 1 usage error, 2 data/config error.
int run_cli(std::vector<std::string> args);

}  // namespace aupipe::cli
