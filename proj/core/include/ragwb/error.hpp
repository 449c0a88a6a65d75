#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ragwb {

/// Broad failure classes. The CLI maps Usage/Parse/Validation/NotFound to
/// exit code 1 and Io/Endpoint to exit code 2.
enum class ErrorKind {
    Usage,
    Parse,
    Validation,
    NotFound,
    Io,
    Endpoint,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Malformed input text. `offset()` is the byte position where parsing stopped.
class ParseError : public Error {
public:
    ParseError(const std::string& message, std::size_t offset)
        : Error(ErrorKind::Parse, message + " (at byte " + std::to_string(offset) + ")"),
          offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

class IoError : public Error {
public:
    explicit IoError(const std::string& message) : Error(ErrorKind::Io, message) {}
};

class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& message)
        : Error(ErrorKind::Validation, message) {}
};

}  // namespace ragwb
