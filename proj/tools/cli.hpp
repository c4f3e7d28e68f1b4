#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fsq {

// Full command-line entry point, factored out of main() so tests can drive
// it in-process. Returns the process exit code: 0 success/stable, 1 crashed
// simulation, 2 usage or config error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fsq
