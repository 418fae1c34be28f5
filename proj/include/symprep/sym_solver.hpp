#pragma once

#include "symprep/linalg.hpp"
#include "symprep/matrix.hpp"

namespace symprep {

/// Outcome of solving S(U, A) = B for Hermitian A.
struct SymSolveReport {
    Matrix solution;
    /// ||S(U, A) - B||.
    double residual_norm = 0.0;
    /// max_jk |alpha_jk| / (||U^-1|| ||B||) where alpha is A in U's eigenbasis; never above 1.
    double bound_ratio = 0.0;
    /// min_jk (mu_j + mu_k) = 2 mu_min; small values mean an ill-conditioned solve.
    double min_eigen_sum = 0.0;
};

/// The symmetric (Jordan) product (UA + AU) / 2.
Matrix sym_product(const Matrix& u, const Matrix& a);

/// Unique Hermitian A with S(U, A) = B, for Hermitian positive definite U.
///
/// Works in U's eigenbasis, where the equation decouples into
/// alpha_jk = 2 beta_jk / (mu_j + mu_k). Throws PreconditionError if U is not
/// positive definite (mu_min <= 1e-12 ||U||) or B is not Hermitian within
/// 1e-10 max(1, ||B||).
SymSolveReport solve_sym(const Matrix& u, const Matrix& b);

/// Same solve against a precomputed eigendecomposition of U (no checks on U).
SymSolveReport solve_sym(const HermitianEigen& u_eig, const Matrix& u, const Matrix& b);

/// Unique skew-Hermitian A with im(U A) = C. For A = iH with H Hermitian,
/// im(U A) = S(U, H), so this is i * solve_sym(U, C).
Matrix solve_skew(const Matrix& u, const Matrix& c);

} // namespace symprep
