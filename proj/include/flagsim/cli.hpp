#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace flagsim::cli {

/// Run the flagsim command line. Exit codes: 0 success, 1 parse/validation
/// error, 2 property-suite failure. All output goes through the streams so
/// the CLI can be driven in-process.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace flagsim::cli
