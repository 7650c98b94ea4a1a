#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace momc {

// Batch front-end.  args excludes the program name.  Exit code 0 means a
// verdict was computed (even a negative one), 1 a usage or input problem,
// 2 a violated internal guarantee.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace momc
