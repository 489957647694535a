#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rarm {

/// Base class for every recoverable failure raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input record. Carries the 1-based line number of the offending record.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class EmptyContextError : public Error {
public:
    using Error::Error;
};

/// Item id or tid outside the context it is applied to.
class DomainError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

/// A measure that has no value for its inputs (confidence of an unsupported
/// antecedent, nDCG without relevant objects, literal interest with lift >= 1).
class UndefinedMetricError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// Caller broke a precondition that is not data dependent (e.g. wrong rule kind).
class ContractError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

} // namespace rarm
