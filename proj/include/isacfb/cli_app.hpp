#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace isacfb {

// Command-line front end. args excludes the program name. Returns 0 on
// success, 2 on configuration errors, 3 on infeasible requests.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace isacfb
