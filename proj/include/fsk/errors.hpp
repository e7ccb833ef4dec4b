#pragma once

#include <stdexcept>
#include <string>

namespace fsk {

// Every failure surfaces as one of two kinds so callers (and the CLI exit
// codes) can tell bad data from a failing filesystem.
enum class ErrorKind { validation, io };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& msg)
        : std::runtime_error(msg), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& msg)
        : Error(ErrorKind::validation, msg) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& msg)
        : Error(ErrorKind::io, msg) {}
};

}  // namespace fsk
