#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace transg::cli {

// Runs one command line (args excludes the program name). Regular output
// goes to `out`; failures are written to `err` as a single JSON object
// {"error": <kind>, "message": ...} and yield a nonzero status.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace transg::cli
