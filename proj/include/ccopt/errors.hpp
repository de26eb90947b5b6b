#pragma once

#include <stdexcept>
#include <string>

namespace ccopt {

// Invalid configuration or malformed input. Maps to CLI exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// The requested problem has no solution in its domain (e.g. no schedule can
// meet the rate profile). Maps to CLI exit code 1.
class InfeasibleError : public std::runtime_error {
public:
    explicit InfeasibleError(const std::string& what) : std::runtime_error(what) {}
};

// A numerical procedure broke down (solver stall, singular basis, bisection
// bracket failure). Maps to CLI exit code 1.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace ccopt
