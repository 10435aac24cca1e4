#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qnewton::cli {

// Runs qnewton-lab with args (args[0] is the program name). Returns the exit
// code: 0 on success, 1 on a library error, 2 on a usage error. Errors are
// written to err as one JSON object.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qnewton::cli
