// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>

#include <unistd.h>

#include "symprep/cli.hpp"
#include "symprep/division.hpp"
#include "symprep/dyadic.hpp"
#include "symprep/errors.hpp"
#include "symprep/io.hpp"
#include "symprep/linalg.hpp"
#include "symprep/preparation.hpp"
#include "symprep/sym_solver.hpp"
#include "../test_support.hpp"

using namespace symprep;
using namespace symprep::testing;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what)
    {
        if (!ok && pass) {
            detail << "first failure: " << what << "; ";
        }
        pass = pass && ok;
    }
};

MultiIndex origin(std::size_t n) { return MultiIndex{0, std::vector<int>(n, 0)}; }

PreparationResult prepare(const MSeries& F, Branch branch = Branch::hermitian_unique, GaugeMap gauge = {})
{
    PreparationInput in;
    in.F = F;
    in.branch = branch;
    in.gauge = std::move(gauge);
    return prepare_formal(in);
}

MSeries random_hermitian_series(std::size_t n, std::size_t N, int P, Rng& rng, bool t_free)
{
    MSeries s(n, N, P);
    for (const auto& idx : indices_up_to(n, P)) {
        if (!t_free || idx.j == 0) {
            s.set(idx, random_hermitian(N, rng) * complex(0.5));
        }
    }
    return s;
}

double elapsed_since(std::chrono::steady_clock::time_point start)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// ---------------------------------------------------------------------------

void residual_vanishing(Outcome& o)
{
    Rng rng(101);
    std::uniform_int_distribution<int> pick_N(1, 4), pick_n(1, 3), pick_P(0, 2);
    double worst = 0.0;
    const auto start = std::chrono::steady_clock::now();
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t N = static_cast<std::size_t>(pick_N(rng));
        const std::size_t n = static_cast<std::size_t>(pick_n(rng));
        const int P = 4 + 2 * pick_P(rng);
        const MSeries F = random_prep_input(n, N, P, rng);
        const auto res = prepare(F);
        const double rel = res.residual_max / F.max_norm();
        worst = std::max(worst, rel);
        o.require(rel <= 1e-9, "trial " + std::to_string(trial));
    }
    const double secs = elapsed_since(start);
    o.require(secs < 30.0, "runtime");
    o.detail << "max residual/||F|| = " << worst << ", " << secs << " s";
}

void scalar_oracle(Outcome& o)
{
    MSeries f(1, 1, 8);
    f.set({1, {0}}, Matrix{{1}});
    f.set({0, {1}}, Matrix{{1}});
    f.set({1, {1}}, Matrix{{1}});
    const auto res = prepare(f);
    double err = 0.0;
    for (int k = 1; k <= 8; ++k) {
        err = std::max(err, std::abs(res.M.coeff({k})(0, 0) - complex(k % 2 == 1 ? 1.0 : -1.0)));
    }
    double binom = 1.0;
    for (int k = 0; k <= 7; ++k) {
        err = std::max(err, std::abs(res.U.coeff({0, {k}})(0, 0) - binom));
        binom *= (0.5 - k) / (k + 1);
    }
    o.require(err <= 1e-12, "coefficient error");
    o.detail << "max coefficient error = " << err;
}

void uniqueness(Outcome& o)
{
    Rng rng(103);
    double perm_diff = 0.0;
    double table_diff = 0.0;
    double gauge_gap = INFINITY;
    for (int trial = 0; trial < 5; ++trial) {
        const std::size_t n = 1 + trial % 3, N = 1 + trial % 4;
        const int P = 4 + trial % 3;
        const MSeries F = random_prep_input(n, N, P, rng);

        // Rebuild F from its coefficient records in a shuffled order, through the file format.
        io::json records = io::series_to_json(F);
        std::shuffle(records.begin(), records.end(), rng);
        const MSeries F2 = io::series_from_json(records, n, N, P);
        const auto a = prepare(F);
        const auto b = prepare(F2);
        perm_diff = std::max({perm_diff, series_distance(a.U, b.U), series_distance(a.M, b.M)});

        GaugeMap k1, k2;
        for (const auto& idx : indices_up_to(n, P - 1)) {
            if (idx.total() > 0) {
                k1.emplace(idx, random_hermitian(N, rng) * complex(0.0, 1.0));
                k2.emplace(idx, random_hermitian(N, rng) * complex(0.0, 1.0));
            }
        }
        const auto g1 = prepare(F, Branch::general, k1);
        const auto g2 = prepare(F, Branch::general, k2);
        gauge_gap = std::min(gauge_gap, series_distance(g1.U, g2.U));
        for (std::size_t d = 0; d < g1.residual.by_degree.size(); ++d) {
            table_diff = std::max(table_diff, std::abs(g1.residual.by_degree[d] - g2.residual.by_degree[d]));
        }
    }
    o.require(perm_diff <= 1e-13, "permuted insertion");
    o.require(gauge_gap > 1e-6, "distinct gauges give distinct U");
    o.require(table_diff <= 1e-12, "residual tables");
    o.detail << "permutation diff = " << perm_diff << ", min U gap between gauges = " << gauge_gap
             << ", residual table diff = " << table_diff;
}

void remainder_path(Outcome& o)
{
    Rng rng(104);
    double worst = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t n = 1 + trial % 3, N = 1 + trial % 4;
        MSeries F = random_prep_input(n, N, 6, rng);
        const Matrix f00 = random_hermitian(N, rng);
        F.set(origin(n), f00);
        PreparationInput in;
        in.F = F;
        const auto [res, rem] = prepare_with_remainder(in);
        // Reconstruct U (tI + M) U^* + F(0,0) and compare against F.
        const MSeries rebuilt = add(mul(mul(res.U, pencil_series(res.M, 6)), adjoint_series(res.U)),
                                    MSeries::constant(n, 6, rem));
        const double rel = series_distance(rebuilt, F) / F.max_norm();
        worst = std::max(worst, rel);
        o.require(rem == f00, "remainder equals F(0,0)");
    }
    o.require(worst <= 1e-9, "reconstruction");
    o.detail << "max reconstruction error/||F|| = " << worst;
}

void linearization(Outcome& o)
{
    Rng rng(105);
    double min_ratio = INFINITY, max_ratio = 0.0;
    for (int trial = 0; trial < 5; ++trial) {
        const std::size_t n = 1 + trial % 2, N = 1 + trial % 3;
        const int P = 4;
        MSeries U = random_hermitian_series(n, N, P, rng, false);
        U.set(origin(n), random_pd(N, rng, 10.0));
        XSeries M(random_hermitian_series(n, N, P, rng, true));
        M.set(std::vector<int>(n, 0), Matrix(N));
        const MSeries u = random_hermitian_series(n, N, P, rng, false);
        const XSeries m(random_hermitian_series(n, N, P, rng, true));
        const FMapValue base = nonlinear_F_map(U, M);
        const FMapValue lin = apply_dF(U, M, u, m);
        std::vector<double> errors;
        for (double eps : {1e-3, 1e-4, 1e-5}) {
            const FMapValue moved = nonlinear_F_map(add(U, scale(u, eps)), XSeries(add(M, scale(m, eps))));
            const double e1 = series_distance(scale(subtract(moved.F1, base.F1), 1.0 / eps), lin.F1);
            const double e0 = series_distance(scale(subtract(moved.F0, base.F0), 1.0 / eps), lin.F0);
            errors.push_back(std::max(e1, e0));
        }
        for (std::size_t k = 1; k < errors.size(); ++k) {
            const double ratio = errors[k - 1] / errors[k];
            min_ratio = std::min(min_ratio, ratio);
            max_ratio = std::max(max_ratio, ratio);
        }
    }
    o.require(min_ratio >= 5.0 && max_ratio <= 20.0, "finite-difference decay ratio");

    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 1 + trial % 3, N = 1 + trial % 4;
        const int P = 4 + trial % 2;
        MSeries U = random_hermitian_series(n, N, P, rng, false);
        U.set(origin(n), random_pd(N, rng, 10.0));
        const MSeries u = random_hermitian_series(n, N, P, rng, false);
        const XSeries m(random_hermitian_series(n, N, P, rng, true));
        const FMapValue a = apply_dF(U, XSeries(n, N, P), u, m);
        const DfSolution s = solve_dF_at_M0(U, a.F1, a.F0, DfSolveMode::symmetric_unique);
        // The x-only top-degree part of u is invisible to the differential and lost to truncation.
        worst = std::max({worst, series_distance(s.m, m), series_distance(s.u.with_order(P - 1), u.with_order(P - 1))});
    }
    o.require(worst <= 1e-9, "round trip");
    o.detail << "error ratios per decade in [" << min_ratio << ", " << max_ratio << "], round-trip error = " << worst;
}

void symmetric_product_solver(Outcome& o)
{
    Rng rng(106);
    double round_trip = 0.0, skew_trip = 0.0, ratio = 0.0, direct_ratio = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t N = 1 + static_cast<std::size_t>(trial % 8);
        const Matrix U = random_pd(N, rng);
        const Matrix B = random_hermitian(N, rng);
        const auto rep = solve_sym(U, B);
        round_trip = std::max(round_trip, (sym_product(U, rep.solution) - B).max_abs() / B.max_abs());
        ratio = std::max(ratio, rep.bound_ratio);

        // Entry bound checked independently in U's eigenbasis.
        const auto eig = hermitian_eigendecomposition(U);
        const Matrix alpha = eig.basis.adjoint() * rep.solution * eig.basis;
        direct_ratio = std::max(direct_ratio, alpha.max_abs() / (operator_norm(inverse(U)) * operator_norm(B)));

        const Matrix C = random_hermitian(N, rng);
        const Matrix A = solve_skew(U, C);
        skew_trip = std::max(skew_trip, (skew_part(U * A) - C).max_abs() / C.max_abs());
    }
    o.require(round_trip <= 1e-11, "sym round trip");
    o.require(skew_trip <= 1e-11, "skew round trip");
    o.require(ratio <= 1.0 + 1e-9 && direct_ratio <= 1.0 + 1e-9, "entry bound");
    o.detail << "sym round trip = " << round_trip << ", skew round trip = " << skew_trip
             << ", max bound ratio = " << std::max(ratio, direct_ratio);
}

void division_oracle(Outcome& o)
{
    Rng rng(107);
    std::uniform_real_distribution<double> norm(0.05, 0.8);
    std::uniform_int_distribution<int> degree(0, 6), dim(1, 4);
    std::vector<double> t(16);
    for (std::size_t i = 0; i < t.size(); ++i) {
        t[i] = -1.5 + 3.0 * static_cast<double>(i) / 15.0;
    }
    double qr_err = 0.0, r_eps_diff = 0.0;
    const auto start = std::chrono::steady_clock::now();
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t N = static_cast<std::size_t>(dim(rng));
        const Pencil p(random_hermitian_with_norm(N, norm(rng), rng));
        MatrixPolynomial g;
        const int d = trial < 10 ? 6 : degree(rng);
        for (int k = 0; k <= d; ++k) {
            g.push_back(random_matrix(N, rng));
        }
        const auto [q, r] = polynomial_divide(g, p);
        const auto G = StripFunction::polynomial(g);
        const auto res = contour_divide(G, p, 0.5, t, 64);
        qr_err = std::max(qr_err, (res.R - r).max_abs());
        for (std::size_t i = 0; i < t.size(); ++i) {
            const Matrix qi = q.empty() ? Matrix(N) : eval_polynomial(q, t[i]);
            qr_err = std::max(qr_err, (res.Q_values[i] - qi).max_abs());
        }
        const auto half = contour_divide(G, p, 0.25, t, 64);
        r_eps_diff = std::max(r_eps_diff, (res.R - half.R).max_abs());
    }
    const double secs = elapsed_since(start);
    o.require(qr_err <= 1e-8, "Q, R against synthetic division");
    o.require(r_eps_diff <= 1e-8, "R at eps and eps/2");
    o.require(secs < 60.0, "runtime");
    o.detail << "max Q/R error = " << qr_err << ", R(eps) - R(eps/2) = " << r_eps_diff << ", " << secs << " s";
}

void estimate_scaling(Outcome& o)
{
    Rng rng(108);
    const Matrix b = random_hermitian_with_norm(2, 0.5, rng);
    const Pencil p(b);
    const Matrix id = Matrix::identity(2);
    const std::vector<NamedStripFunction> family{
        {"t^2", StripFunction::polynomial({Matrix(2), Matrix(2), id})},
        {"sin", StripFunction::sampler(2, [id](complex s) { return id * std::sin(s); }, 1.0, std::cosh(1.0))},
        {"pencil^2", StripFunction::polynomial({b * b, b * complex(2.0), id})},
        {"gaussian", StripFunction::sampler(2, [id](complex s) { return id * std::exp(-s * s); }, 1.0, std::exp(1.0))},
    };
    std::vector<double> eps;
    for (int k = 1; k <= 6; ++k) {
        eps.push_back(std::ldexp(1.0, -k));
    }
    const auto table = estimate_report(family, p, eps, default_t_points());
    o.require(table.rows.size() == 24, "row count");
    o.require(table.max_est_Q <= 10.0 && table.max_est_R <= 10.0, "estimates bounded by 10");
    o.detail << "max est_Q = " << table.max_est_Q << ", max est_R = " << table.max_est_R;
}

void dyadic_division(Outcome& o)
{
    const auto start = std::chrono::steady_clock::now();
    const UniformGrid grid{-6.4, 0.05, 256};
    auto samples = [&](std::size_t N) {
        std::vector<Matrix> s;
        for (std::size_t k = 0; k < grid.count; ++k) {
            const double t = grid.at(k);
            s.push_back(Matrix::identity(N) * complex(std::exp(-t * t)));
        }
        return s;
    };

    const auto zero = smooth_divide_dyadic(samples(1), grid, Pencil(Matrix(1)));
    double oracle_err = std::abs(zero.R(0, 0) - 1.0);
    for (std::size_t k = 0; k < zero.t_points.size(); ++k) {
        const double t = zero.t_points[k];
        const double q = std::abs(t) < 1e-12 ? 0.0 : (std::exp(-t * t) - 1.0) / t;
        oracle_err = std::max(oracle_err, std::abs(zero.Q_values[k](0, 0) - q));
    }
    o.require(oracle_err <= 1e-6, "B = 0 oracle");

    Rng rng(109);
    bool monotone = true;
    double final_rel = 0.0;
    for (int trial = 0; trial < 3; ++trial) {
        const std::size_t N = 2 + static_cast<std::size_t>(trial);
        const Pencil p(random_hermitian_with_norm(N, 0.5, rng));
        DyadicOptions opt;
        opt.bands = 8;
        const auto res = smooth_divide_dyadic(samples(N), grid, p, opt);
        for (std::size_t j = 3; j <= 8; ++j) {
            monotone = monotone && res.residual_by_bands[j] <= res.residual_by_bands[j - 1];
        }
        final_rel = std::max(final_rel, res.residual_max / res.sup_norm_G);
    }
    const double secs = elapsed_since(start);
    o.require(monotone, "monotone residual in J");
    o.require(final_rel <= 1e-6, "final residual");
    o.require(secs < 120.0, "runtime");
    o.detail << "oracle error = " << oracle_err << ", final residual/M_G = " << final_rel << ", " << secs << " s";
}

void precondition_necessity(Outcome& o)
{
    const auto dir = std::filesystem::temp_directory_path() / ("symprep_acceptance_" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir);
    auto run = [](std::vector<std::string> args, std::string& err) {
        args.insert(args.begin(), "symprep");
        std::ostringstream out, e;
        const int code = cli::run(args, out, e);
        err = e.str();
        return code;
    };

    const io::json indefinite = {{"schema_version", 1}, {"kind", "prepare"}, {"n", 1}, {"N", 2}, {"P", 4},
                                 {"coefficients", {{{"j", 1}, {"alpha", {0}}, {"re", {{1, 0}, {0, -1}}}}}}};
    io::write_json(dir / "indefinite.json", indefinite);
    std::string err;
    const int c1 = run({"prepare", (dir / "indefinite.json").string()}, err);
    o.require(c1 == 2 && err.find("d/dt F(0,0) > 0") != std::string::npos, "indefinite F_{1,0}");
    o.detail << "indefinite F_{1,0}: exit " << c1 << " \"" << err.substr(0, err.find('\n')) << "\"";

    for (double norm : {1.0, 1.5}) {
        const io::json big = {{"schema_version", 1}, {"kind", "divide"}, {"N", 2},
                              {"pencil", {{"re", {{norm, 0.0}, {0.0, 0.2}}}}}, {"eps", 0.5},
                              {"G", {{"type", "builtin"}, {"name", "t_power"}}}};
        io::write_json(dir / "big.json", big);
        const int c2 = run({"divide", (dir / "big.json").string()}, err);
        o.require(c2 == 2 && err.find("||B|| < 1") != std::string::npos, "||B|| >= 1");
        o.detail << "; ||B|| = " << norm << ": exit " << c2 << " \"" << err.substr(0, err.find('\n')) << "\"";
    }
    std::filesystem::remove_all(dir);
}

} // namespace

int main()
{
    const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria{
        {"AC1 residual vanishing on 50 random Hermitian F", residual_vanishing},
        {"AC2 scalar closed-form oracle t + x + tx", scalar_oracle},
        {"AC3 Hermitian-branch uniqueness and gauge freedom", uniqueness},
        {"AC4 preparation with remainder F(0,0)", remainder_path},
        {"AC5 linearization consistency and right inverse", linearization},
        {"AC6 symmetric-product solver round trip and bound", symmetric_product_solver},
        {"AC7 contour division against synthetic division", division_oracle},
        {"AC8 estimate scaling bounded by 10", estimate_scaling},
        {"AC9 dyadic division of a smooth decaying G", dyadic_division},
        {"AC10 precondition violations exit with code 2", precondition_necessity},
    };
    int failures = 0;
    for (const auto& [name, check] : criteria) {
        Outcome o;
        try {
            check(o);
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << "exception: " << e.what();
        }
        std::cout << (o.pass ? "PASS " : "FAIL ") << name << " | " << o.detail.str() << std::endl;
        failures += o.pass ? 0 : 1;
    }
    std::cout << (criteria.size() - static_cast<std::size_t>(failures)) << "/" << criteria.size() << " criteria passed"
              << std::endl;
    return failures == 0 ? 0 : 1;
}
