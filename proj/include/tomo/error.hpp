#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace tomo {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// A ray does not intersect the domain.
class NoIntersection : public Error {
public:
    using Error::Error;
};

/// A field or sample contained NaN or infinity.
class NonFiniteValue : public Error {
public:
    using Error::Error;
};

/// File could not be read or written, or its contents are malformed.
class IoError : public Error {
public:
    using Error::Error;
};

/// Experiment configuration failed validation. `fields()` names every
/// offending entry using dotted paths such as "noise.h".
class ConfigError : public Error {
public:
    ConfigError(std::vector<std::string> fields, const std::string& message)
        : Error(message), fields_(std::move(fields)) {}

    const std::vector<std::string>& fields() const noexcept { return fields_; }

private:
    std::vector<std::string> fields_;
};

}  // namespace tomo
