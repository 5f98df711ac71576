#pragma once

#include <stdexcept>
#include <string>

namespace bgw {

// Bad user-supplied configuration: malformed files, inconsistent flags,
// values outside their documented domain.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Structurally valid input that fails a documented precondition
// (parameter outside the admissible set, unachievable count vector, ...).
class PreconditionError : public std::runtime_error {
public:
    explicit PreconditionError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace bgw
