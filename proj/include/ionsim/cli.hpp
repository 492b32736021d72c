#pragma once

#include <string>
#include <vector>

namespace ionsim {

// Dispatches one subcommand. Exit codes: 0 ok, 1 validation (bad arguments or
// config), 2 runtime failure.
int run_cli(const std::vector<std::string>& args);

}  // namespace ionsim
