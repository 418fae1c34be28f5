#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "symprep/errors.hpp"
#include "symprep/linalg.hpp"
#include "symprep/preparation.hpp"
#include "test_support.hpp"

using namespace symprep;
using namespace symprep::testing;

namespace {

MultiIndex ix(int j, std::vector<int> alpha) { return MultiIndex{j, std::move(alpha)}; }

PreparationResult prepare(const MSeries& F, Branch branch = Branch::hermitian_unique, GaugeMap gauge = {})
{
    PreparationInput in;
    in.F = F;
    in.branch = branch;
    in.gauge = std::move(gauge);
    return prepare_formal(in);
}

MSeries scalar_example(int P)
{
    MSeries f(1, 1, P);
    const Matrix one{{1}};
    f.set(ix(1, {0}), one);
    f.set(ix(0, {1}), one);
    f.set(ix(1, {1}), one);
    return f;
}

double binomial_half(int k)
{
    double c = 1.0;
    for (int i = 0; i < k; ++i) {
        c *= (0.5 - i) / (i + 1);
    }
    return c;
}

MSeries random_hermitian_series(std::size_t n, std::size_t N, int P, Rng& rng, bool t_free = false)
{
    MSeries s(n, N, P);
    for (const auto& idx : indices_up_to(n, P)) {
        if (!t_free || idx.j == 0) {
            s.set(idx, random_hermitian(N, rng) * complex(0.5));
        }
    }
    return s;
}

double map_distance(const FMapValue& a, const FMapValue& b)
{
    return std::max(series_distance(a.F1, b.F1), series_distance(a.F0, b.F0));
}

} // namespace

TEST_CASE("identity preparation")
{
    const MSeries F = MSeries::monomial(ix(1, {0}), 4, Matrix::identity(2));
    const auto res = prepare(F);
    CHECK(series_distance(res.U, MSeries::constant(1, 4, Matrix::identity(2))) == 0.0);
    CHECK(res.M.series().empty());
    CHECK(res.residual_max == 0.0);
}

TEST_CASE("(t + x) I prepares to U = I, M = x I")
{
    const Matrix id = Matrix::identity(2);
    const MSeries F = add(MSeries::monomial(ix(1, {0}), 4, id), MSeries::monomial(ix(0, {1}), 4, id));
    const auto res = prepare(F);
    CHECK(series_distance(res.U, MSeries::constant(1, 4, id)) < 1e-15);
    CHECK(series_distance(res.M, MSeries::monomial(ix(0, {1}), 4, id)) < 1e-15);
}

TEST_CASE("scalar t + x + t x matches sqrt(1 + x) and x / (1 + x)")
{
    const auto res = prepare(scalar_example(8));
    for (int k = 1; k <= 8; ++k) {
        CHECK(std::abs(res.M.coeff({k})(0, 0) - complex(k % 2 == 1 ? 1.0 : -1.0)) <= 1e-12);
    }
    for (int k = 0; k <= 7; ++k) {
        CHECK(std::abs(res.U.coeff(ix(0, {k}))(0, 0) - binomial_half(k)) <= 1e-12);
    }
    CHECK(res.U.coeff(ix(1, {0})).is_zero());

    const std::vector<double> x{0.2};
    CHECK(std::abs(eval(res.U, 0.1, x)(0, 0) - std::sqrt(1.2)) < 1e-5);
    CHECK(std::abs(eval(res.M, 0.1, x)(0, 0) - 0.2 / 1.2) < 1e-5);
}

TEST_CASE("conjugated pencil recovers the Hermitian-branch representative")
{
    Rng rng(30);
    const int P = 4;
    const Matrix v = random_unitary(2, rng);
    MSeries pencil(1, 2, P);
    pencil.set(ix(1, {0}), Matrix::identity(2));
    pencil.set(ix(0, {1}), Matrix::diagonal({1, -1}));
    const MSeries Vs = MSeries::constant(1, P, v);
    const MSeries F = mul(mul(Vs, pencil), adjoint_series(Vs));
    const auto res = prepare(F);
    CHECK(res.residual_max <= 1e-10);
    // U_{0,0} is the positive square root of V V^* = I, so U is not V.
    CHECK(max_diff(res.U.coeff(ix(0, {0})), Matrix::identity(2)) < 1e-12);
    CHECK(series_distance(res.U, Vs) > 0.1);
}

TEST_CASE("random Hermitian F: residual, Hermitian coefficients, RHS consistency")
{
    Rng rng(31);
    for (int trial = 0; trial < 12; ++trial) {
        const std::size_t N = 1 + trial % 4;
        const std::size_t n = 1 + trial % 3;
        const int P = 4 + 2 * (trial % 2);
        const MSeries F = random_prep_input(n, N, P, rng);
        const auto res = prepare(F);
        CHECK(res.residual_max <= 1e-9 * res.f_norm);
        CHECK(res.M.series().max_asymmetry() <= 1e-11);
        CHECK(res.U.max_asymmetry() <= 1e-11);
        CHECK(res.max_rhs_asymmetry <= 1e-10);
        CHECK(res.U.order() == P);
        for (const auto& [idx, c] : res.U) {
            CHECK(idx.total() <= P - 1);
        }
    }
}

TEST_CASE("general branch with skew gauges")
{
    Rng rng(32);
    const MSeries F = random_prep_input(2, 3, 5, rng);
    GaugeMap gauge;
    gauge.emplace(ix(1, {0, 1}), random_hermitian(3, rng) * complex(0.0, 1.0));
    gauge.emplace(ix(0, {2, 0}), random_hermitian(3, rng) * complex(0.0, 1.0));
    const auto plain = prepare(F, Branch::general);
    const auto gauged = prepare(F, Branch::general, gauge);
    CHECK(plain.residual_max <= 1e-9 * plain.f_norm);
    CHECK(gauged.residual_max <= 1e-9 * gauged.f_norm);
    CHECK(series_distance(plain.U, gauged.U) > 1e-3);

    GaugeMap bad;
    bad.emplace(ix(1, {0, 0}), Matrix::identity(3));
    CHECK_THROWS_AS(prepare(F, Branch::general, bad), PreconditionError);
    GaugeMap origin;
    origin.emplace(ix(0, {0, 0}), Matrix::identity(3) * complex(0.0, 1.0));
    CHECK_THROWS_AS(prepare(F, Branch::general, origin), PreconditionError);
}

TEST_CASE("prepare_formal preconditions")
{
    MSeries indefinite(1, 2, 3);
    indefinite.set(ix(1, {0}), Matrix::diagonal({1, -1}));
    CHECK_THROWS_WITH_AS(prepare(indefinite), doctest::Contains("d/dt F(0,0) > 0"), PreconditionError);

    MSeries shifted = MSeries::monomial(ix(1, {0}), 3, Matrix::identity(2));
    shifted.set(ix(0, {0}), Matrix::identity(2));
    CHECK_THROWS_WITH_AS(prepare(shifted), doctest::Contains("F(0,0) = 0"), PreconditionError);

    MSeries nonsym = MSeries::monomial(ix(1, {0}), 3, Matrix::identity(2));
    nonsym.set(ix(0, {1}), Matrix{{0, 1}, {0, 0}});
    CHECK_THROWS_AS(prepare(nonsym), PreconditionError);
}

TEST_CASE("preparation with remainder")
{
    Rng rng(33);
    const Matrix c = random_hermitian(2, rng);
    MSeries F = MSeries::monomial(ix(1, {0}), 3, Matrix::identity(2));
    F.set(ix(0, {0}), c);
    PreparationInput in;
    in.F = F;
    const auto [res, f00] = prepare_with_remainder(in);
    CHECK(f00 == c);
    CHECK(series_distance(res.U, MSeries::constant(1, 3, Matrix::identity(2))) == 0.0);
    CHECK(res.M.series().empty());

    const MSeries G = random_prep_input(2, 3, 6, rng);
    in.F = G;
    const auto [plain_res, zero] = prepare_with_remainder(in);
    CHECK(zero.is_zero());
    CHECK(plain_res.U == prepare(G).U);
    CHECK(plain_res.residual_max <= 1e-9 * plain_res.f_norm);
}

TEST_CASE("verify_preparation detects tampering and is gauge covariant")
{
    Rng rng(34);
    const MSeries F = random_prep_input(2, 2, 5, rng);
    const auto res = prepare(F);
    const ResidualTable table = verify_preparation(F, res.U, res.M, 5);
    CHECK(table.max == res.residual_max);

    MSeries tampered = res.U;
    const double delta = 1e-3;
    tampered.accumulate(ix(1, {1, 0}), Matrix::identity(2) * complex(delta));
    CHECK(verify_preparation(F, tampered, res.M, 5).max >= 0.1 * delta);

    const Matrix a = random_unitary(2, rng);
    const MSeries Ua = mul(res.U, MSeries::constant(2, 5, a));
    const MSeries As = MSeries::constant(2, 5, a.adjoint());
    const XSeries Ma(mul(mul(As, res.M), MSeries::constant(2, 5, a)));
    const ResidualTable rotated = verify_preparation(F, Ua, Ma, 5);
    REQUIRE(rotated.by_degree.size() == table.by_degree.size());
    for (std::size_t d = 0; d < table.by_degree.size(); ++d) {
        CHECK(std::abs(rotated.by_degree[d] - table.by_degree[d]) <= 1e-12);
    }

    CHECK(verify_preparation(F, res.U, res.M, 4).by_degree.size() == 5);
}

TEST_CASE("nonlinear_F_map examples")
{
    const Matrix id = Matrix::identity(2);
    const auto a = nonlinear_F_map(MSeries::constant(1, 3, id), XSeries(1, 2, 3));
    CHECK(a.F1 == MSeries::constant(1, 3, id));
    CHECK(a.F0.series().empty());

    XSeries m(1, 2, 3);
    m.set({1}, id);
    const auto b = nonlinear_F_map(MSeries::constant(1, 3, id), m);
    CHECK(b.F1 == MSeries::constant(1, 3, id));
    CHECK(b.F0 == m);

    // Scalar u = sqrt(1+x) truncated, m = x - x^2: F1 = u^2, F0 = u^2 m.
    const int P = 4;
    MSeries u(1, 1, P);
    for (int k = 0; k <= P; ++k) {
        u.set(ix(0, {k}), Matrix{{binomial_half(k)}});
    }
    XSeries ms(1, 1, P);
    ms.set({1}, Matrix{{1}});
    ms.set({2}, Matrix{{-1}});
    const MSeries product = mul(mul(u, pencil_series(ms, P)), u);
    const auto c = nonlinear_F_map(u, ms);
    CHECK(series_distance(c.F1, dt(product)) < 1e-15);
    CHECK(series_distance(c.F0, t_zero_slice(product)) < 1e-15);
}

TEST_CASE("apply_dF examples")
{
    Rng rng(35);
    const Matrix id = Matrix::identity(2);
    const MSeries U = MSeries::constant(1, 3, id);
    XSeries m(1, 2, 3);
    m.set({1}, random_hermitian(2, rng));
    const auto a = apply_dF(U, XSeries(1, 2, 3), MSeries(1, 2, 3), m);
    CHECK(a.F1.empty());
    CHECK(a.F0 == m);

    const Matrix c = random_hermitian(2, rng);
    const auto b = apply_dF(U, XSeries(1, 2, 3), MSeries::constant(1, 3, c * complex(0.5)), XSeries(1, 2, 3));
    CHECK(series_distance(b.F1, MSeries::constant(1, 3, c)) < 1e-15);
    CHECK(b.F0.series().empty());

    XSeries skew(1, 2, 3);
    skew.set({1}, id * complex(0.0, 1.0));
    CHECK_THROWS_AS(apply_dF(U, XSeries(1, 2, 3), MSeries(1, 2, 3), skew), PreconditionError);
}

TEST_CASE("apply_dF matches finite differences to first order")
{
    Rng rng(36);
    const std::size_t n = 1, N = 2;
    const int P = 4;
    MSeries U = random_hermitian_series(n, N, P, rng);
    U.set(ix(0, {0}), random_pd(N, rng, 10.0));
    XSeries M(random_hermitian_series(n, N, P, rng, true));
    M.set({0}, Matrix(N));
    const MSeries u = random_hermitian_series(n, N, P, rng);
    const XSeries m(random_hermitian_series(n, N, P, rng, true));

    const FMapValue base = nonlinear_F_map(U, M);
    const FMapValue lin = apply_dF(U, M, u, m);
    std::vector<double> errors;
    for (double eps : {1e-3, 1e-4, 1e-5}) {
        const FMapValue moved = nonlinear_F_map(add(U, scale(u, eps)), XSeries(add(M, scale(m, eps))));
        const FMapValue quotient{scale(subtract(moved.F1, base.F1), 1.0 / eps),
                                 XSeries(scale(subtract(moved.F0, base.F0), 1.0 / eps))};
        errors.push_back(map_distance(quotient, lin));
    }
    for (std::size_t k = 1; k < errors.size(); ++k) {
        const double ratio = errors[k - 1] / errors[k];
        CHECK(ratio >= 5.0);
        CHECK(ratio <= 20.0);
    }
}

TEST_CASE("solve_dF_at_M0 examples")
{
    Rng rng(37);
    const Matrix id = Matrix::identity(2);
    const MSeries U = MSeries::constant(1, 3, id);
    const Matrix c = random_hermitian(2, rng);
    for (auto mode : {DfSolveMode::gauge_zero, DfSolveMode::symmetric_unique}) {
        const auto s = solve_dF_at_M0(U, MSeries::constant(1, 3, c), XSeries(1, 2, 3), mode);
        CHECK(s.m.series().empty());
        CHECK(series_distance(s.u, MSeries::constant(1, 3, c * complex(0.5))) < 1e-15);

        XSeries a0(1, 2, 3);
        a0.set({0}, c);
        const auto z = solve_dF_at_M0(U, MSeries(1, 2, 3), a0, mode);
        CHECK(z.m == a0);
        CHECK(z.u.max_norm() < 1e-15);
    }
}

TEST_CASE("solve_dF_at_M0 inverts apply_dF in the symmetric mode")
{
    Rng rng(38);
    for (int trial = 0; trial < 6; ++trial) {
        const std::size_t n = 1 + trial % 2;
        const std::size_t N = 1 + trial % 3;
        const int P = 4;
        MSeries U = random_hermitian_series(n, N, P, rng);
        U.set(ix(0, std::vector<int>(n, 0)), random_pd(N, rng, 10.0));
        const MSeries u = random_hermitian_series(n, N, P, rng);
        const XSeries m(random_hermitian_series(n, N, P, rng, true));
        const XSeries zero(n, N, P);
        const FMapValue a = apply_dF(U, zero, u, m);
        const DfSolution s = solve_dF_at_M0(U, a.F1, a.F0, DfSolveMode::symmetric_unique);
        CHECK(series_distance(s.m, m) <= 1e-9);
        CHECK(series_distance(s.u.with_order(P - 1), u.with_order(P - 1)) <= 1e-9);

        const DfSolution g = solve_dF_at_M0(U, a.F1, a.F0, DfSolveMode::gauge_zero);
        const FMapValue back = apply_dF(U, zero, g.u, g.m);
        CHECK(series_distance(back.F1.with_order(P - 2), a.F1.with_order(P - 2)) <= 1e-9);
        CHECK(series_distance(back.F0, a.F0) <= 1e-9);
    }
}
