#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace gnf {

// Runs one command-line invocation (argv without the program name); normal
// output goes to `out`, diagnostics to `err`. Exit code contract:
//   0  success (an undefined result is still a result)
//   1  rejected system, failed verification, or bound violations
//   2  usage, parse, or I/O error
//   3  evaluation error
int run_cli(std::vector<std::string> args, std::ostream& out,
            std::ostream& err);

}  // namespace gnf
