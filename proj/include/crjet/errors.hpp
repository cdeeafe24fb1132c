#ifndef CRJET_ERRORS_HPP
#define CRJET_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace crjet
{

class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// Mixing series over different variable lists.
class IncompatibleSeries : public Error
{
public:
    using Error::Error;
};

// An operation was applied outside its domain (zero constant term for a
// reciprocal, degenerate derivative for an implicit solve, ...).
class DomainError : public Error
{
public:
    using Error::Error;
};

// The requested result needs more coefficients than the inputs carry.
class TruncationError : public Error
{
public:
    using Error::Error;
};

// The exact backend was asked for an irrational quantity.
class BackendError : public Error
{
public:
    using Error::Error;
};

// Eigenvalue branches that cannot be separated inside the truncation window.
class DegeneracyError : public Error
{
public:
    using Error::Error;
};

class ParseError : public Error
{
public:
    ParseError(const std::string &what, int line)
        : Error("line " + std::to_string(line) + ": " + what), line_(line)
    {
    }
    int line() const { return line_; }

private:
    int line_;
};

} // namespace crjet

#endif
