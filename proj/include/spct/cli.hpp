#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace spct {

// Exit codes: 0 success, 1 invalid input or configuration, 2 I/O failure.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, char** argv);

} // namespace spct
