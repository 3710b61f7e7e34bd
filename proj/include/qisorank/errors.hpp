#pragma once

#include <stdexcept>
#include <string>

namespace qisorank {

// Base class for everything this library throws. The CLI maps subclasses
// onto exit codes: input/contract problems -> 1, convergence/size -> 2,
// I/O -> 3.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input text (carries a 1-based line number when known).
class ParseError : public Error {
public:
    ParseError(const std::string& msg, std::size_t line)
        : Error("line " + std::to_string(line) + ": " + msg), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

// Input violates a documented precondition (self-loop, empty graph,
// disconnected network, bad register id, ...).
class ValidationError : public Error {
public:
    using Error::Error;
};

// A caller handed us data that breaks an internal contract
// (non-Hermitian matrix where Hermitian is required, etc).
class ContractError : public Error {
public:
    using Error::Error;
};

// Value outside its admissible interval.
class RangeError : public Error {
public:
    using Error::Error;
};

// Result would exceed the configured state-size cap.
class SizeError : public Error {
public:
    using Error::Error;
};

// Iteration failed to reach tolerance within the step budget.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& msg, double residual)
        : Error(msg), residual_(residual) {}
    double residual() const { return residual_; }

private:
    double residual_;
};

// File unreadable / unwritable.
class IoError : public Error {
public:
    using Error::Error;
};

} // namespace qisorank
