#include "symprep/sym_solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "symprep/errors.hpp"

namespace symprep {

Matrix sym_product(const Matrix& u, const Matrix& a)
{
    if (u.dim() != a.dim()) {
        throw DimensionError("sym_product: dimension mismatch");
    }
    Matrix s = u * a;
    s.add_product(a, u);
    s *= 0.5;
    return s;
}

SymSolveReport solve_sym(const HermitianEigen& u_eig, const Matrix& u, const Matrix& b)
{
    const std::size_t n = u.dim();
    const Matrix& v = u_eig.basis;
    const auto& mu = u_eig.eigenvalues;

    const Matrix beta = v.adjoint() * b * v;
    Matrix alpha(n);
    double max_alpha = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = 0; k < n; ++k) {
            alpha(j, k) = 2.0 * beta(j, k) / (mu[j] + mu[k]);
            max_alpha = std::max(max_alpha, std::abs(alpha(j, k)));
        }
    }

    SymSolveReport report;
    report.solution = hermitian_part(v * alpha * v.adjoint());
    report.residual_norm = operator_norm(sym_product(u, report.solution) - b);
    const double b_norm = operator_norm(b);
    report.bound_ratio = b_norm > 0.0 ? max_alpha * mu.front() / b_norm : 0.0;
    report.min_eigen_sum = 2.0 * mu.front();
    return report;
}

SymSolveReport solve_sym(const Matrix& u, const Matrix& b)
{
    if (u.dim() != b.dim()) {
        throw DimensionError("solve_sym: dimension mismatch");
    }
    const auto eig = hermitian_eigendecomposition(u);
    const double u_norm = std::max(std::abs(eig.eigenvalues.front()), std::abs(eig.eigenvalues.back()));
    if (!(eig.eigenvalues.front() > 1e-12 * u_norm)) {
        std::ostringstream msg;
        msg << "solve_sym: U must be positive definite (smallest eigenvalue " << eig.eigenvalues.front() << ")";
        throw PreconditionError(msg.str());
    }
    const double asym = asymmetry(b);
    if (asym > 1e-10 * std::max(1.0, operator_norm(b))) {
        std::ostringstream msg;
        msg << "solve_sym: right-hand side is not Hermitian (||B - B*|| = " << asym << ")";
        throw PreconditionError(msg.str());
    }
    return solve_sym(eig, u, hermitian_part(b));
}

Matrix solve_skew(const Matrix& u, const Matrix& c)
{
    return complex{0.0, 1.0} * solve_sym(u, c).solution;
}

} // namespace symprep
