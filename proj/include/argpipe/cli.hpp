#pragma once

#include <string>
#include <vector>

namespace argpipe {

// Dispatches argv to a subcommand. Returns 0 on success, 1 on runtime
// failure, 2 on usage errors.
int run_cli(int argc, const char* const* argv);
int run_cli(const std::vector<std::string>& args);  // args without argv[0]

}  // namespace argpipe
