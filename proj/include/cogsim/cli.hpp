#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace cogsim::cli {

// Runs one CLI invocation. Exit codes: 0 success, 1 validation error,
// 2 infeasible schedule or capacity error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cogsim::cli
