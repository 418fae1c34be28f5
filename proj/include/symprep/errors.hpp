#pragma once

#include <stdexcept>
#include <string>

namespace symprep {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operands with incompatible shapes (matrix dimension, variable count).
class DimensionError : public Error {
public:
    using Error::Error;
};

/// A mathematical hypothesis of an operation is violated: non-Hermitian
/// input, indefinite matrix where positivity is required, pencil norm >= 1,
/// strip width out of range. The CLI maps this to exit code 2.
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// Numerically singular matrix handed to an inversion.
class SingularMatrixError : public Error {
public:
    using Error::Error;
};

/// Iterative kernel did not reach its threshold within the iteration cap.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

} // namespace symprep
