#pragma once

#include <stdexcept>
#include <string>

namespace pathlift {

/// Bad user input: non-finite data, dimension mismatch, invalid parameter.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Cholesky pivot failure: the matrix handed in was not positive definite,
/// or a triangular factor carries a zero diagonal.
class FactorizationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A solver iterate left the finite range. Usually means the gradient
/// descent rate is too large for the problem data.
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(const std::string& what, long iteration)
        : std::runtime_error(what), iteration(iteration) {}

    long iteration;
};

/// Manifest / configuration file problem; message names the offending
/// key or line.
class ManifestError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace pathlift
