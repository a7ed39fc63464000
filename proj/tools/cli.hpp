#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace thermo::cli {

// Runs one command line (without the program name). Exit codes: 0 success,
// 1 domain failure (e.g. infeasible transition), 2 invalid input.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace thermo::cli
