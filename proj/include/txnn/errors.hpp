#pragma once

#include <stdexcept>
#include <string>

namespace txnn {

// Thrown when matrix/vector dimensions are incompatible.
class ShapeError : public std::runtime_error {
public:
    explicit ShapeError(const std::string& what) : std::runtime_error(what) {}
};

// Thrown for out-of-domain arguments (negative stddev, rate >= 1, ...).
class ArgumentError : public std::invalid_argument {
public:
    explicit ArgumentError(const std::string& what) : std::invalid_argument(what) {}
};

// Thrown when an operation is called in the wrong order
// (backward before forward, optimizer step before backward).
class StateError : public std::logic_error {
public:
    explicit StateError(const std::string& what) : std::logic_error(what) {}
};

// Thrown for malformed or truncated data files.
class FormatError : public std::runtime_error {
public:
    explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace txnn
