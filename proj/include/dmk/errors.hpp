#pragma once

#include <stdexcept>
#include <string>

namespace dmk {

/// Bad arguments or malformed inputs: caller error, exit code 2 at the CLI.
struct InvalidInput : std::runtime_error {
    explicit InvalidInput(const std::string& msg) : std::runtime_error(msg) {}
};

/// Numerical breakdown (singular innovation, non-positive spectrum), exit code 3.
struct NumericalDegeneracy : std::runtime_error {
    explicit NumericalDegeneracy(const std::string& msg) : std::runtime_error(msg) {}
};

/// File system and parse failures, exit code 4.
struct IoError : std::runtime_error {
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace dmk
