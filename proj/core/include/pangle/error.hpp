#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pangle {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on an argument (shape, range, ordering) was violated.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Data did not carry enough numerical rank for the requested operation.
class RankDeficient : public Error {
public:
    RankDeficient(const std::string& what, std::ptrdiff_t achieved_rank)
        : Error(what), achieved_rank_(achieved_rank) {}

    std::ptrdiff_t achieved_rank() const noexcept { return achieved_rank_; }

private:
    std::ptrdiff_t achieved_rank_;
};

/// A bound was requested outside the SNR regime where it is defined.
class RegimeViolation : public Error {
public:
    using Error::Error;
};

/// Numerical failure during an iterative procedure.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Malformed input file. Carries the 1-based line number (0 when not line specific).
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line)
        : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace pangle
