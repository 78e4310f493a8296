#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gsobol::cli {

// Runs one command line (args exclude the program name). Writes results to
// `out` (or the --out file) and structured errors to `err`. Returns the
// process exit code: 0 ok, 2 config, 3 numeric degeneracy, 4 external model.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gsobol::cli
