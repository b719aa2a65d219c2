#ifndef E2PA_ERROR_HPP
#define E2PA_ERROR_HPP

#include <stdexcept>
#include <string>

namespace e2pa {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A numeric operation could not produce a result (bad domain, pole, no root).
class NumericError : public Error {
public:
    using Error::Error;
};

/// Input outside the mathematical domain of an operation.
class DomainError : public NumericError {
public:
    using NumericError::NumericError;
};

/// Dead-time correction pole reached: the detector is saturated.
class SaturationError : public NumericError {
public:
    using NumericError::NumericError;
};

/// Configuration missing keys, unknown keys, or invalid values.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// File could not be opened or written.
class IoError : public Error {
public:
    using Error::Error;
};

/// Malformed data file. Carries the offending line number (1-based, 0 if unknown).
class ParseError : public IoError {
public:
    ParseError(const std::string& file, std::size_t line, const std::string& what)
        : IoError(file + ":" + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

namespace detail {

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw DomainError(msg);
}

} // namespace detail

} // namespace e2pa

#endif
