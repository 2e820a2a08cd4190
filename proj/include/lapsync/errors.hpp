#pragma once

#include <stdexcept>
#include <string>

namespace lapsync {

/// Base class for all errors thrown by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid input data: bad dimensions, violated invariants, matrices that are
/// not PSD / not Laplacians / disconnected where connectivity is required.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Numerical failure inside an algorithm: non-convergence, unstable dynamics,
/// singular or ill-conditioned linear systems, failed line searches.
class SolverError : public Error {
public:
    using Error::Error;
};

/// File reading/writing and parsing failures.
class IoError : public Error {
public:
    using Error::Error;
};

} // namespace lapsync
