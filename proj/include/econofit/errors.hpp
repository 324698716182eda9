#pragma once

#include <stdexcept>
#include <string>

namespace econofit {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed input text; carries the 1-based line number when known.
struct ParseError : Error {
    ParseError(std::string msg, int line = 0)
        : Error(line > 0 ? "line " + std::to_string(line) + ": " + std::move(msg)
                         : std::move(msg)),
          line_number(line) {}
    int line_number;
};

// Well-formed input violating a domain invariant.
struct ValidationError : Error {
    using Error::Error;
};

// Argument outside the mathematical domain of an operation.
struct DomainError : Error {
    using Error::Error;
};

// Two series that cannot be combined (unit/kind/variable/length mismatch).
struct IncompatibleSeriesError : Error {
    using Error::Error;
};

struct InsufficientDataError : Error {
    using Error::Error;
};

struct FitError : Error {
    using Error::Error;
};

}  // namespace econofit
