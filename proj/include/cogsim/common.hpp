#pragma once

#include <stdexcept>
#include <string>

namespace cogsim {

// Rejected input: bad dimensions, malformed documents, out-of-range fields.
// CLI maps this to exit code 1.
class validation_error : public std::runtime_error {
public:
    explicit validation_error(const std::string& what) : std::runtime_error(what) {}
};

// A tile or workload does not fit the configured hardware.
// CLI maps this to exit code 2.
class capacity_error : public std::runtime_error {
public:
    explicit capacity_error(const std::string& what) : std::runtime_error(what) {}
};

class infeasible_error : public std::runtime_error {
public:
    explicit infeasible_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace cogsim
