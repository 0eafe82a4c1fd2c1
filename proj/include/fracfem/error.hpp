#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fracfem {

// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed input file; `line()` is 1-based, 0 when unknown.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line)
        : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// Input that parses but violates a documented precondition or invariant.
class ValidationError : public Error {
public:
    using Error::Error;
};

// Numerical breakdown: singular kernel evaluation, failed factorization, no convergence.
class NumericalError : public Error {
public:
    using Error::Error;
};

}  // namespace fracfem
