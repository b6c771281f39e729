#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ratq {

// Runs the ratq command line against the given streams. `args` is argv
// without the program name. Exit status: 0 success, 1 domain/evaluation
// error, 2 usage error.
int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace ratq
