#pragma once

#include <stdexcept>
#include <string>

namespace modeswim {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Non-finite or out-of-range numeric input.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Invalid or inconsistent configuration (mesh sizes, boundary specs, patches, config files).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Two fields or vectors that should share a layout do not.
class ShapeError : public Error {
public:
    using Error::Error;
};

class AssemblyError : public Error {
public:
    using Error::Error;
};

/// Factorization breakdown or other failure inside the eigensolver.
class SolverError : public Error {
public:
    using Error::Error;
};

class ConvergenceError : public SolverError {
public:
    using SolverError::SolverError;
};

class CalibrationError : public Error {
public:
    using Error::Error;
};

/// Undamped drive exactly at a natural frequency.
class SingularityError : public Error {
public:
    using Error::Error;
};

class UndefinedAngleError : public Error {
public:
    using Error::Error;
};

}  // namespace modeswim
