#pragma once

#include <map>
#include <utility>
#include <vector>

#include "symprep/matrix.hpp"
#include "symprep/series.hpp"

namespace symprep {

/// Which solution of 2 re(U_{j,a} U_{0,0}^*) = RHS the recursion picks.
enum class Branch {
    /// U_{0,0} = psd_sqrt(F_{1,0}) and every U_{j,a} Hermitian: the unique symmetric preparation.
    hermitian_unique,
    /// U_{0,0} = Cholesky factor, U_{j,a} = (RHS/2 + K_{j,a}) U_{0,0}^{-*} for a skew gauge K.
    general,
};

const char* to_string(Branch b);

/// Relative tolerances; all scaled by max(1, ||F||) where ||F|| is the largest
/// coefficient operator norm.
struct PrepTolerances {
    double hermitian = 1e-12;     ///< F coefficients Hermitian
    double f00 = 1e-12;           ///< F_{0,0} = 0
    double rhs_hermitian = 1e-9;  ///< right-hand sides stay Hermitian, relative to the subtracted product
    double residual = 1e-9;       ///< residual_max acceptance
};

using GaugeMap = std::map<MultiIndex, Matrix, GradedLexLess>;

struct PreparationInput {
    MSeries F;
    /// Truncation order; negative means F.order().
    int order = -1;
    Branch branch = Branch::hermitian_unique;
    /// Skew-Hermitian K_{j,a}, read only in the general branch; absent entries are zero.
    GaugeMap gauge;
    PrepTolerances tol;
};

struct ResidualTable {
    /// Largest coefficient operator norm of the residual at each total degree 0..P.
    std::vector<double> by_degree;
    double max = 0.0;
};

struct PreparationResult {
    MSeries U;
    XSeries M;
    Branch branch = Branch::hermitian_unique;
    double residual_max = 0.0;
    ResidualTable residual;
    /// ||F|| used to scale tolerances.
    double f_norm = 0.0;
    /// Largest ||RHS - RHS^*|| seen in the recursion, relative to max(1, ||F||, ||known part||);
    /// zero in exact arithmetic.
    double max_rhs_asymmetry = 0.0;
    /// 2 mu_min(U_{0,0}); small values flag an ill-conditioned recursion.
    double min_eigen_sum = 0.0;
};

/// Formal symmetric preparation F = U (t I + M) U^* through total degree P.
///
/// U_{0,0} comes from F_{1,0} = U_{0,0} U_{0,0}^*. For p = 1..P the recursion
/// first solves U_{p,0}, then sweeps layers r = 0..p-1: the M_a with |a| = p
/// (at r = p-1) and the U_{p-r-1,a} with |a| = r+1. Each unknown is read off
/// the coefficient of F one t-degree up, minus the part of U (tI+M) U^*
/// already determined. U is computed through degree P-1 and M through P,
/// which is exactly what the degree <= P residual depends on.
///
/// Throws PreconditionError if F is not Hermitian, F_{0,0} != 0, or F_{1,0}
/// is not positive definite; Error if a recursion right-hand side loses
/// Hermitian symmetry beyond tol.rhs_hermitian.
PreparationResult prepare_formal(const PreparationInput& input);

/// Preparation with remainder: F = U (tI + M) U^* + F(0,0). Runs
/// prepare_formal on F - F_{0,0} and returns F_{0,0} alongside.
std::pair<PreparationResult, Matrix> prepare_with_remainder(const PreparationInput& input);

/// The t I + M pencil as a series of the given order.
MSeries pencil_series(const XSeries& M, int order);

/// Per-degree norms of F - U (t I + M) U^* through degree `order`.
ResidualTable verify_preparation(const MSeries& F, const MSeries& U, const XSeries& M, int order);

struct FMapValue {
    MSeries F1;  ///< d/dt (U (tI + M) U^*)
    XSeries F0;  ///< U_0 M U_0^*, U_0 = U(0, x)
};

/// The nonlinear map (U, M) -> (F1, F0).
FMapValue nonlinear_F_map(const MSeries& U, const XSeries& M);

/// Differential of nonlinear_F_map at (U, M) in direction (u, m):
///   A1 = d/dt(2 re(U (tI + M) u^*) + U m U^*),  A0 = U_0 m U_0^* + 2 re(U_0 M u_0^*).
/// Throws PreconditionError unless m has Hermitian coefficients.
FMapValue apply_dF(const MSeries& U, const XSeries& M, const MSeries& u, const XSeries& m);

enum class DfSolveMode {
    /// Antisymmetric freedom B set to zero.
    gauge_zero,
    /// B chosen so that u is Hermitian; requires Hermitian U with U_{0,0} > 0.
    symmetric_unique,
};

struct DfSolution {
    MSeries u;
    XSeries m;
};

/// Right inverse of apply_dF(U, 0, ., .):
///   m = U_0^{-1} A0 U_0^{-*},  A = (int_0^t A1 + A0 - U m U^*) / t,  u = (A - B) U^{-*} / 2,
/// with B = 0 or the skew solution of im(U^{-1} B) = -im(U^{-1} A).
/// The top-degree coefficient of u is lost to truncation.
DfSolution solve_dF_at_M0(const MSeries& U, const MSeries& A1, const XSeries& A0, DfSolveMode mode);

/// Hermitian-coefficient H with (W H + H W) / 2 = C in the series ring,
/// solved degree by degree against the positive definite constant term of W.
MSeries solve_sym_series(const MSeries& W, const MSeries& C);

} // namespace symprep
