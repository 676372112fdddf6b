#pragma once

#include <stdexcept>
#include <string>

namespace hydro {

// Base class for every error raised by the library. Catch this in front ends.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed input text (CSV row, date, number). Carries the 1-based row when known.
class ParseError : public Error {
public:
    ParseError(const std::string& what, long row = -1)
        : Error(row >= 0 ? "row " + std::to_string(row) + ": " + what : what), row_(row) {}
    [[nodiscard]] long row() const noexcept { return row_; }

private:
    long row_;
};

class SchemaError : public Error { using Error::Error; };
class DomainError : public Error { using Error::Error; };
class SizeError : public Error { using Error::Error; };
class RangeError : public Error { using Error::Error; };
class GapError : public Error { using Error::Error; };
class NumericError : public Error { using Error::Error; };
class EstimationError : public Error { using Error::Error; };
class ConfigError : public Error { using Error::Error; };
class IoError : public Error { using Error::Error; };

}  // namespace hydro
