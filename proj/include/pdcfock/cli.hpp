#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace pdcfock {

// Command-line front end. `args` holds the program arguments without the
// executable name. Returns the process exit code: 0 on success, 1 for
// configuration problems, 2 for numerical failures, 3 when the built-in
// equivalence suite finds a mismatch.
int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace pdcfock
