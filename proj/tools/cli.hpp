#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qm::cli {

// Runs the driver on argv-style arguments (args[0] is the program name).
// Returns 0 on success, 2 for configuration errors, 3 for numerical failures.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qm::cli
