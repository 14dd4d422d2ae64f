#pragma once

#include <stdexcept>
#include <string>

namespace hybridsim {

// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Physically invalid input (negative field, unphysical linewidth, off-branch frequency).
class DomainError : public Error {
public:
    using Error::Error;
};

// Caller violated a precondition that is not a physics statement (empty grid, bad step size).
class UsageError : public Error {
public:
    using Error::Error;
};

// A numerical procedure could not produce a trustworthy answer.
class DiagnosticError : public Error {
public:
    using Error::Error;
};

class FitError : public DiagnosticError {
public:
    using DiagnosticError::DiagnosticError;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

} // namespace hybridsim
