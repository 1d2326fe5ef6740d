#pragma once

#include <stdexcept>
#include <string>

namespace freemax {

// Thrown when an iterative scheme fails to meet its contract (fixed-point
// stagnation, bracket exhaustion, non-Herglotz boundary values, ...).
// The CLI maps this to exit code 3; bad user input maps to 2.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

// A catalog law was asked for an operation it does not support
// (e.g. gridding a law that has no usable density representation).
class UnsupportedLawError : public std::invalid_argument {
public:
    explicit UnsupportedLawError(const std::string& what) : std::invalid_argument(what) {}
};

} // namespace freemax
