#include "symprep/preparation.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include "symprep/errors.hpp"
#include "symprep/linalg.hpp"
#include "symprep/sym_solver.hpp"

namespace symprep {

const char* to_string(Branch b)
{
    return b == Branch::hermitian_unique ? "hermitian" : "general";
}

namespace {

MultiIndex zero_index(std::size_t n)
{
    return MultiIndex{0, std::vector<int>(n, 0)};
}

MultiIndex t_index(std::size_t n)
{
    return MultiIndex{1, std::vector<int>(n, 0)};
}

// Coefficient at `target` of U (tI + M) U^*, from whatever U and M currently hold.
Matrix product_coefficient(const MSeries& U, const MSeries& M, const MultiIndex& target)
{
    const std::size_t n = U.num_vars();
    Matrix acc(U.dim());
    for (const auto& a : sub_indices(target)) {
        const Matrix* ua = U.find(a);
        if (!ua) {
            continue;
        }
        const MultiIndex rest = target - a;
        if (rest.j >= 1) {
            if (const Matrix* uc = U.find(rest - t_index(n))) {
                acc.add_product(*ua, uc->adjoint());
            }
        }
        for (const auto& [m_idx, m_c] : M) {
            if (!le(m_idx, rest)) {
                continue;
            }
            if (const Matrix* uc = U.find(rest - m_idx)) {
                acc.add_product(*ua * m_c, uc->adjoint());
            }
        }
    }
    return acc;
}

class Recursion {
public:
    Recursion(const MSeries& F, const PreparationInput& in, double f_norm)
        : F_(F), in_(in), scale_(std::max(1.0, f_norm)), U_(F.num_vars(), F.dim(), F.order()),
          M_(F.num_vars(), F.dim(), F.order())
    {
    }

    void run()
    {
        const std::size_t n = F_.num_vars();
        const int P = F_.order();
        const Matrix f10 = F_.coeff(t_index(n));

        const Matrix u00 = in_.branch == Branch::hermitian_unique ? psd_sqrt(f10) : cholesky_lower(f10);
        U_.set(zero_index(n), u00);
        u00_ = u00;
        u00_inv_ = inverse(u00);
        u00_adj_inv_ = u00_inv_.adjoint();
        if (in_.branch == Branch::hermitian_unique) {
            u00_eig_ = hermitian_eigendecomposition(u00);
            min_eigen_sum_ = 2.0 * u00_eig_->eigenvalues.front();
        } else {
            min_eigen_sum_ = 2.0 * min_eigenvalue(f10);
        }

        for (int p = 1; p <= P; ++p) {
            const bool solve_u = p <= P - 1;
            if (solve_u) {
                MultiIndex idx = zero_index(n);
                idx.j = p;
                solve_u_coefficient(idx);
            }
            for (int r = 0; r < p; ++r) {
                const auto layer = indices_of_degree(n, r + 1);
                if (r + 1 == p) {
                    for (const auto& idx : layer) {
                        if (idx.j == 0) {
                            solve_m_coefficient(idx);
                        }
                    }
                }
                if (!solve_u) {
                    continue;
                }
                for (auto idx : layer) {
                    if (idx.j != 0) {
                        continue;
                    }
                    idx.j = p - r - 1;
                    solve_u_coefficient(idx);
                }
            }
        }
    }

    MSeries take_u() { return std::move(U_); }
    XSeries take_m() { return XSeries(std::move(M_)); }
    double max_rhs_asymmetry() const { return max_rhs_asym_; }
    double min_eigen_sum() const { return min_eigen_sum_; }

private:
    Matrix hermitian_rhs(const MultiIndex& target)
    {
        const Matrix known = product_coefficient(U_, M_, target);
        Matrix rhs = F_.coeff(target) - known;
        // Rounding in `known` grows with its size, which can far exceed ||F||
        // at high degree when the series has a small radius of convergence.
        const double asym = asymmetry(rhs) / std::max(scale_, operator_norm(known));
        max_rhs_asym_ = std::max(max_rhs_asym_, asym);
        if (asym > in_.tol.rhs_hermitian) {
            std::ostringstream msg;
            msg << "prepare_formal: right-hand side at (j=" << target.j << ", |alpha|=" << target.total() - target.j
                << ") is not Hermitian (||R - R*|| = " << asym << "); input is inconsistent";
            throw Error(msg.str());
        }
        return hermitian_part(rhs);
    }

    // 2 re(U_idx U_{0,0}^*) = F_{idx + e_t} - (known part of the product).
    void solve_u_coefficient(const MultiIndex& idx)
    {
        MultiIndex target = idx;
        target.j += 1;
        const Matrix half_rhs = hermitian_rhs(target) * 0.5;
        Matrix u;
        if (in_.branch == Branch::hermitian_unique) {
            u = solve_sym(*u00_eig_, u00_, half_rhs).solution;
        } else {
            Matrix shifted = half_rhs;
            if (auto it = in_.gauge.find(idx); it != in_.gauge.end()) {
                shifted += it->second;
            }
            u = shifted * u00_adj_inv_;
        }
        U_.set(idx, std::move(u));
    }

    // U_{0,0} M_a U_{0,0}^* = F_{0,a} - (known part of the product).
    void solve_m_coefficient(const MultiIndex& idx)
    {
        const Matrix rhs = hermitian_rhs(idx);
        M_.set(idx, hermitian_part(u00_inv_ * rhs * u00_adj_inv_));
    }

    const MSeries& F_;
    const PreparationInput& in_;
    double scale_;
    MSeries U_;
    MSeries M_;
    Matrix u00_;
    Matrix u00_inv_;
    Matrix u00_adj_inv_;
    std::optional<HermitianEigen> u00_eig_;
    double max_rhs_asym_ = 0.0;
    double min_eigen_sum_ = 0.0;
};

void validate_gauge(const PreparationInput& in, double scale)
{
    for (const auto& [idx, k] : in.gauge) {
        if (idx.alpha.size() != in.F.num_vars() || k.dim() != in.F.dim()) {
            throw DimensionError("prepare_formal: gauge entry has the wrong shape");
        }
        if (idx.total() == 0) {
            throw PreconditionError("prepare_formal: gauge at (0,0) is not supported; U_{0,0} is the Cholesky factor");
        }
        if (skew_asymmetry(k) > 1e-12 * std::max(scale, operator_norm(k))) {
            throw PreconditionError("prepare_formal: gauge K must be skew-Hermitian (K* = -K)");
        }
    }
}

MSeries prepared_input(const PreparationInput& in)
{
    return in.order < 0 ? in.F : in.F.with_order(in.order);
}

void check_hermitian_input(const MSeries& F, const PrepTolerances& tol, double scale)
{
    for (const auto& [idx, c] : F) {
        const double asym = asymmetry(c);
        if (asym > tol.hermitian * scale) {
            std::ostringstream msg;
            msg << "F must be symmetric (F* = F): coefficient at (j=" << idx.j << ", |alpha|=" << idx.total() - idx.j
                << ") has ||F - F*|| = " << asym;
            throw PreconditionError(msg.str());
        }
    }
}

void check_positive_derivative(const MSeries& F)
{
    const Matrix f10 = F.coeff(t_index(F.num_vars()));
    const double lowest = min_eigenvalue(f10);
    if (!(lowest > 1e-12 * std::max(1.0, operator_norm(f10)))) {
        std::ostringstream msg;
        msg << "precondition d/dt F(0,0) > 0 violated: smallest eigenvalue of F_{1,0} is " << lowest;
        throw PreconditionError(msg.str());
    }
}

} // namespace

PreparationResult prepare_formal(const PreparationInput& input)
{
    const MSeries F = prepared_input(input);
    const double f_norm = F.max_norm();
    const double scale = std::max(1.0, f_norm);
    check_hermitian_input(F, input.tol, scale);

    const double f00 = operator_norm(F.coeff(zero_index(F.num_vars())));
    if (f00 > input.tol.f00 * f_norm) {
        std::ostringstream msg;
        msg << "precondition F(0,0) = 0 violated: ||F_{0,0}|| = " << f00
            << " (use the remainder form to prepare F - F(0,0))";
        throw PreconditionError(msg.str());
    }
    check_positive_derivative(F);
    if (input.branch == Branch::general) {
        validate_gauge(input, scale);
    }
    if (F.order() < 1) {
        throw Error("prepare_formal: truncation order must be at least 1");
    }

    Recursion rec(F, input, f_norm);
    rec.run();

    PreparationResult out;
    out.branch = input.branch;
    out.f_norm = f_norm;
    out.max_rhs_asymmetry = rec.max_rhs_asymmetry();
    out.min_eigen_sum = rec.min_eigen_sum();
    out.U = rec.take_u();
    out.M = rec.take_m();
    out.residual = verify_preparation(F, out.U, out.M, F.order());
    out.residual_max = out.residual.max;
    return out;
}

std::pair<PreparationResult, Matrix> prepare_with_remainder(const PreparationInput& input)
{
    PreparationInput shifted = input;
    shifted.F = prepared_input(input);
    shifted.order = -1;
    const MultiIndex zero = zero_index(shifted.F.num_vars());
    Matrix f00 = shifted.F.coeff(zero);
    shifted.F.set(zero, Matrix(shifted.F.dim()));
    auto result = prepare_formal(shifted);
    // Residual and tolerances are reported against the full F.
    result.f_norm = std::max(result.f_norm, operator_norm(f00));
    return {std::move(result), std::move(f00)};
}

MSeries pencil_series(const XSeries& M, int order)
{
    MSeries v = M.series().with_order(order);
    v.accumulate(t_index(M.num_vars()), Matrix::identity(M.dim()));
    return v;
}

ResidualTable verify_preparation(const MSeries& F, const MSeries& U, const XSeries& M, int order)
{
    const MSeries Fo = F.with_order(order);
    const MSeries Uo = U.with_order(order);
    const MSeries product = mul(mul(Uo, pencil_series(M, order)), adjoint_series(Uo));
    const MSeries diff = subtract(Fo, product);

    ResidualTable table;
    table.by_degree.assign(static_cast<std::size_t>(order) + 1, 0.0);
    for (const auto& [idx, c] : diff) {
        auto& slot = table.by_degree[static_cast<std::size_t>(idx.total())];
        slot = std::max(slot, operator_norm(c));
    }
    table.max = table.by_degree.empty() ? 0.0 : *std::max_element(table.by_degree.begin(), table.by_degree.end());
    return table;
}

FMapValue nonlinear_F_map(const MSeries& U, const XSeries& M)
{
    const int order = std::min(U.order(), M.order());
    const MSeries product = mul(mul(U, pencil_series(M, order)), adjoint_series(U));
    const XSeries u0 = t_zero_slice(U);
    const MSeries f0 = mul(mul(u0, M), adjoint_series(u0));
    return {dt(product), XSeries(f0)};
}

namespace {

MSeries twice_re(const MSeries& x)
{
    return add(x, adjoint_series(x));
}

MSeries im_series(const MSeries& x)
{
    // (X - X^*) / (2i), coefficientwise
    return scale(subtract(x, adjoint_series(x)), complex{0.0, -0.5});
}

} // namespace

FMapValue apply_dF(const MSeries& U, const XSeries& M, const MSeries& u, const XSeries& m)
{
    if (!m.is_hermitian(1e-10)) {
        throw PreconditionError("apply_dF: m must have Hermitian coefficients");
    }
    const int order = std::min({U.order(), M.order(), u.order(), m.order()});
    const MSeries u_adj = adjoint_series(u);
    const MSeries U_adj = adjoint_series(U);

    const MSeries first = twice_re(mul(mul(U, pencil_series(M, order)), u_adj));
    const MSeries second = mul(mul(U, m), U_adj);
    const MSeries a1 = dt(add(first, second));

    const XSeries U0 = t_zero_slice(U);
    const XSeries u0 = t_zero_slice(u);
    const MSeries a0 = add(mul(mul(U0, m), adjoint_series(U0)), twice_re(mul(mul(U0, M), adjoint_series(u0))));
    return {a1, XSeries(a0)};
}

MSeries solve_sym_series(const MSeries& W, const MSeries& C)
{
    const std::size_t n = W.num_vars();
    const Matrix w00 = W.coeff(zero_index(n));
    const auto w00_eig = hermitian_eigendecomposition(w00);
    if (!(w00_eig.eigenvalues.front() > 1e-12 * std::max(1.0, w00_eig.eigenvalues.back()))) {
        throw PreconditionError("solve_sym_series: constant term must be positive definite");
    }
    const int order = std::min(W.order(), C.order());
    MSeries H(n, W.dim(), order);
    for (const auto& k : indices_up_to(n, order)) {
        Matrix rhs = C.coeff(k);
        for (const auto& b : sub_indices(k)) {
            if (b.total() == 0) {
                continue;
            }
            const Matrix* wb = W.find(b);
            const Matrix* hk = wb ? H.find(k - b) : nullptr;
            if (hk) {
                rhs -= sym_product(*wb, *hk);
            }
        }
        H.set(k, solve_sym(w00_eig, w00, hermitian_part(rhs)).solution);
    }
    return H;
}

DfSolution solve_dF_at_M0(const MSeries& U, const MSeries& A1, const XSeries& A0, DfSolveMode mode)
{
    const int order = std::min({U.order(), A1.order(), A0.order()});
    const MSeries Uo = U.with_order(order);
    const std::size_t n = Uo.num_vars();

    if (mode == DfSolveMode::symmetric_unique) {
        const double u_scale = std::max(1.0, Uo.max_norm());
        if (Uo.max_asymmetry() > 1e-11 * u_scale) {
            throw PreconditionError("solve_dF_at_M0: symmetric mode requires Hermitian U coefficients");
        }
        if (!(min_eigenvalue(Uo.coeff(zero_index(n))) > 0.0)) {
            throw PreconditionError("solve_dF_at_M0: symmetric mode requires U(0,0) > 0");
        }
    }

    const XSeries U0 = t_zero_slice(Uo);
    const MSeries U0_inv = series_inverse(U0);
    const XSeries m(hermitian_part_series(mul(mul(U0_inv, A0), adjoint_series(U0_inv))));

    const MSeries numerator = subtract(add(integrate_t(A1.with_order(order)), A0), mul(mul(Uo, m), adjoint_series(Uo)));
    const MSeries A = hermitian_part_series(divide_by_t(numerator));

    const MSeries U_inv = series_inverse(Uo);
    if (mode == DfSolveMode::gauge_zero) {
        return {scale(mul(A, adjoint_series(U_inv)), 0.5), m};
    }

    // With W = U^{-1} Hermitian and B = iH, im(W B) = S(W, H).
    const MSeries W = hermitian_part_series(U_inv);
    const MSeries H = solve_sym_series(W, scale(im_series(mul(W, A)), -1.0));
    const MSeries B = scale(H, complex{0.0, 1.0});
    const MSeries u = hermitian_part_series(scale(mul(subtract(A, B), W), 0.5));
    return {u, m};
}

} // namespace symprep
