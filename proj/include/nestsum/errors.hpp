#pragma once

// Failure taxonomy. The CLI maps these to exit codes: parse 2, domain 3,
// numeric 4, resource 5. Library code throws; nothing here is recoverable
// state, only diagnosis.

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nestsum {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParseError : Error {
    size_t position;  // byte offset into the input
    ParseError(const std::string& msg, size_t pos)
        : Error(msg + " (at position " + std::to_string(pos) + ")"), position(pos) {}
};

struct DomainError : Error {
    using Error::Error;
};

struct NumericError : Error {
    using Error::Error;
};

struct ResourceGuard : Error {
    using Error::Error;
};

}  // namespace nestsum
