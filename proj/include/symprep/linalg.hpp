#pragma once

#include <vector>

#include "symprep/matrix.hpp"

namespace symprep {

/// Spectral decomposition A = basis * diag(eigenvalues) * basis^*.
/// Eigenvalues ascending; each basis column has its largest-magnitude
/// component real positive (ties go to the lowest row index).
struct HermitianEigen {
    std::vector<double> eigenvalues;
    Matrix basis;
};

/// re A = (A + A^*) / 2.
Matrix hermitian_part(const Matrix& a);

/// im A = (A - A^*) / (2i); always Hermitian, and A = re A + i im A.
Matrix skew_part(const Matrix& a);

/// Operator norm of A - A^*.
double asymmetry(const Matrix& a);

/// Operator norm of A + A^* (distance from the skew-Hermitian matrices, times 2).
double skew_asymmetry(const Matrix& a);

/// Cyclic Jacobi eigensolver for Hermitian input.
///
/// Throws PreconditionError when ||A - A^*|| exceeds 1e-12 * max(1, ||A||),
/// ConvergenceError when 100 sweeps do not bring the off-diagonal Frobenius
/// norm below 1e-14 * ||A||_F. The input is symmetrized before the sweeps.
HermitianEigen hermitian_eigendecomposition(const Matrix& a);

/// The unique Hermitian positive definite square root.
/// Throws PreconditionError (reporting the smallest eigenvalue) unless every
/// eigenvalue exceeds 1e-12 * max(1, ||A||).
Matrix psd_sqrt(const Matrix& a);

/// Lower-triangular L with positive diagonal and L L^* = A.
Matrix cholesky_lower(const Matrix& a);

/// Gaussian elimination with partial pivoting; SingularMatrixError when a
/// pivot falls below 1e-14 times the largest entry.
Matrix inverse(const Matrix& a);

complex determinant(const Matrix& a);

/// Largest singular value.
double operator_norm(const Matrix& a);

/// Smallest eigenvalue of a Hermitian matrix (no symmetry check).
double min_eigenvalue(const Matrix& a);

} // namespace symprep
