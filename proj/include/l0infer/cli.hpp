#pragma once

#include <string>
#include <vector>

namespace l0infer {

// Exit codes: 0 success, 1 computation failure, 2 usage/config error.
int run_cli(const std::vector<std::string>& args);

}  // namespace l0infer
