#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace wkam {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Expression syntax / evaluation error, with the offending position.
class ParseError : public Error {
public:
    ParseError(const std::string& msg, std::size_t pos)
        : Error(msg + " (at position " + std::to_string(pos) + ")"), position(pos) {}
    std::size_t position;
};

/// Invalid or rejected configuration (schema violations carry a JSON pointer).
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& msg, std::string pointer = "")
        : Error(pointer.empty() ? msg : msg + " [" + pointer + "]"),
          json_pointer(std::move(pointer)) {}
    std::string json_pointer;
};

/// A minimizer or maximizer landed on the boundary of its search window,
/// meaning the window (momentum box, velocity bound) is too small.
class BoundaryError : public Error {
public:
    using Error::Error;
};

} // namespace wkam
