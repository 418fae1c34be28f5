#include "symprep/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>

#include "symprep/division.hpp"
#include "symprep/dyadic.hpp"
#include "symprep/errors.hpp"
#include "symprep/io.hpp"
#include "symprep/linalg.hpp"
#include "symprep/preparation.hpp"

namespace symprep::cli {

using io::json;

namespace {

constexpr double kPrepareTol = 1e-9;
constexpr double kDivideTol = 1e-8;
constexpr double kDyadicTol = 1e-6;
constexpr double kEstimateBound = 10.0;
// Recomputed residual tables must match the recorded ones this closely.
constexpr double kReproductionTol = 1e-12;

json result_header(const char* kind, const json& problem)
{
    return json{{"schema_version", io::kSchemaVersion},
                {"kind", kind},
                {"tool", "symprep"},
                {"version", SYMPREP_VERSION},
                {"input_hash", io::content_hash(problem)}};
}

std::string problem_kind(const json& doc)
{
    const json& kind = io::require(doc, "kind");
    if (!kind.is_string()) {
        throw io::SchemaError("field \"kind\" must be a string");
    }
    return kind.get<std::string>();
}

std::size_t positive_dim(const json& doc, const char* key)
{
    const int v = io::require_int(doc, key);
    if (v < 1) {
        throw io::SchemaError(std::string("field \"") + key + "\" must be positive");
    }
    return static_cast<std::size_t>(v);
}

std::vector<double> parse_list(const std::string& text, const char* what)
{
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) {
                throw std::invalid_argument(item);
            }
        } catch (const std::exception&) {
            throw io::SchemaError(std::string(what) + ": cannot parse \"" + item + "\"");
        }
    }
    if (out.empty()) {
        throw io::SchemaError(std::string(what) + ": empty list");
    }
    return out;
}

json matrices_to_json(const std::vector<Matrix>& ms)
{
    json out = json::array();
    for (const auto& m : ms) {
        out.push_back(io::matrix_to_json(m));
    }
    return out;
}

std::vector<Matrix> matrices_from_json(const json& arr, std::size_t dim, const char* what)
{
    if (!arr.is_array()) {
        throw io::SchemaError(std::string(what) + " must be an array of matrices");
    }
    std::vector<Matrix> out;
    for (const auto& m : arr) {
        out.push_back(io::matrix_from_json(m, dim));
    }
    return out;
}

// ---- prepare -------------------------------------------------------------

struct PrepareProblem {
    std::size_t n = 0;
    std::size_t N = 0;
    int P = 0;
    json coefficients;
};

PrepareProblem load_prepare_problem(const json& doc)
{
    io::check_header(doc, "prepare");
    PrepareProblem p;
    const int n = io::require_int(doc, "n");
    if (n < 0) {
        throw io::SchemaError("field \"n\" must be nonnegative");
    }
    p.n = static_cast<std::size_t>(n);
    p.N = positive_dim(doc, "N");
    p.P = io::require_int(doc, "P");
    if (p.P < 1) {
        throw io::SchemaError("field \"P\" must be at least 1");
    }
    p.coefficients = io::require(doc, "coefficients");
    return p;
}

GaugeMap load_gauge(const std::string& path, std::size_t n, std::size_t N, int order)
{
    const json doc = io::read_json(path);
    io::check_header(doc, "gauge");
    const MSeries k = io::series_from_json(io::require(doc, "entries"), n, N, order);
    GaugeMap gauge;
    for (const auto& [idx, c] : k) {
        gauge.emplace(idx, c);
    }
    return gauge;
}

json residual_json(const ResidualTable& table, double f_norm, double rel_tol)
{
    return json{{"by_degree", table.by_degree},
                {"max", table.max},
                {"f_norm", f_norm},
                {"relative_tolerance", rel_tol},
                {"tolerance", rel_tol * std::max(1.0, f_norm)}};
}

void print_residual_table(std::ostream& out, const std::vector<double>& by_degree)
{
    out << "degree  residual\n";
    for (std::size_t d = 0; d < by_degree.size(); ++d) {
        out << std::setw(6) << d << "  " << std::scientific << std::setprecision(3) << by_degree[d] << '\n';
    }
    out << std::defaultfloat;
}

int cmd_prepare(const std::string& input, std::optional<int> order_flag, const std::string& branch_name,
                const std::string& gauge_file, const std::string& out_path, std::ostream& out)
{
    const json doc = io::read_json(input);
    const PrepareProblem problem = load_prepare_problem(doc);
    const int order = order_flag.value_or(problem.P);
    if (order < 1) {
        throw io::SchemaError("--order must be at least 1");
    }

    PreparationInput in;
    in.F = io::series_from_json(problem.coefficients, problem.n, problem.N, order);
    in.order = order;
    in.branch = branch_name == "general" ? Branch::general : Branch::hermitian_unique;
    in.tol.residual = tolerance_from_env(kPrepareTol);
    if (!gauge_file.empty()) {
        if (in.branch != Branch::general) {
            throw io::SchemaError("--gauge-file requires --branch general");
        }
        in.gauge = load_gauge(gauge_file, problem.n, problem.N, order);
    }

    const MultiIndex origin{0, std::vector<int>(problem.n, 0)};
    const double f_scale = std::max(1.0, in.F.max_norm());
    const Matrix* f00 = in.F.find(origin);
    const bool remainder = f00 != nullptr && operator_norm(*f00) > in.tol.f00 * f_scale;

    PreparationResult res;
    Matrix remainder_term(problem.N);
    if (remainder) {
        std::tie(res, remainder_term) = prepare_with_remainder(in);
    } else {
        res = prepare_formal(in);
    }

    const double tol_abs = in.tol.residual * std::max(1.0, res.f_norm);
    const bool ok = res.residual_max <= tol_abs;

    json result = result_header("prepare", doc);
    result["branch"] = to_string(res.branch);
    result["order"] = order;
    result["n"] = problem.n;
    result["N"] = problem.N;
    result["remainder_path"] = remainder;
    if (remainder) {
        result["F00"] = io::matrix_to_json(remainder_term);
    }
    result["U"] = io::series_to_json(res.U);
    result["M"] = io::series_to_json(res.M.series());
    if (res.branch == Branch::general) {
        json gauge = json::array();
        for (const auto& [idx, k] : in.gauge) {
            json rec = io::matrix_to_json(k);
            rec["j"] = idx.j;
            rec["alpha"] = idx.alpha;
            gauge.push_back(std::move(rec));
        }
        result["gauge"] = std::move(gauge);
    }
    result["residual"] = residual_json(res.residual, res.f_norm, in.tol.residual);
    result["diagnostics"] = {{"max_rhs_asymmetry", res.max_rhs_asymmetry}, {"min_eigen_sum", res.min_eigen_sum}};
    result["status"] = ok ? "ok" : "residual above tolerance";

    if (!out_path.empty()) {
        io::write_json(out_path, result);
    }
    out << "prepare: branch " << to_string(res.branch) << ", order " << order
        << (remainder ? ", with remainder F(0,0)" : "") << '\n';
    print_residual_table(out, res.residual.by_degree);
    out << "residual_max " << res.residual_max << " (tolerance " << tol_abs << ") " << (ok ? "ok" : "FAIL") << '\n';
    return ok ? kOk : kVerificationFailure;
}

int verify_prepare(const json& result, const json& problem_doc, std::ostream& out)
{
    const PrepareProblem problem = load_prepare_problem(problem_doc);
    const int order = io::require_int(result, "order");
    MSeries F = io::series_from_json(problem.coefficients, problem.n, problem.N, order);
    if (io::require(result, "remainder_path").get<bool>()) {
        const MultiIndex origin{0, std::vector<int>(problem.n, 0)};
        F.set(origin, Matrix(problem.N));
    }
    const MSeries U = io::series_from_json(io::require(result, "U"), problem.n, problem.N, order);
    const XSeries M(io::series_from_json(io::require(result, "M"), problem.n, problem.N, order));

    const ResidualTable table = verify_preparation(F, U, M, order);
    const json& recorded = io::require(result, "residual");
    const std::vector<double> recorded_rows = io::number_list(io::require(recorded, "by_degree"), "by_degree");
    const double tol = io::require_number(recorded, "tolerance");

    double deviation = recorded_rows.size() == table.by_degree.size() ? 0.0 : INFINITY;
    for (std::size_t d = 0; d < std::min(recorded_rows.size(), table.by_degree.size()); ++d) {
        deviation = std::max(deviation, std::abs(recorded_rows[d] - table.by_degree[d]));
    }
    const double f_scale = std::max(1.0, io::require_number(recorded, "f_norm"));
    const bool reproduced = deviation <= kReproductionTol * f_scale;
    const bool within = table.max <= tol;

    print_residual_table(out, table.by_degree);
    out << "residual_max " << table.max << " (tolerance " << tol << ") " << (within ? "ok" : "FAIL") << '\n';
    out << "deviation from recorded table " << deviation << ' ' << (reproduced ? "ok" : "FAIL") << '\n';
    return within && reproduced ? kOk : kVerificationFailure;
}

// ---- divide --------------------------------------------------------------

struct DivideProblem {
    std::size_t N = 0;
    Pencil pencil;
    StripFunction G;
    bool left = false;
    std::optional<double> eps;
    std::vector<double> t_points;
    int panels = kDefaultPanelsPerUnit;
};

Pencil load_pencil(const json& doc, std::size_t N)
{
    return Pencil(io::matrix_from_json(io::require(doc, "pencil"), N));
}

std::vector<double> t_points_or_default(const json& doc)
{
    return doc.contains("t_points") ? io::number_list(doc["t_points"], "t_points") : default_t_points();
}

int panels_or_default(const json& doc)
{
    return doc.contains("panels") ? io::require_int(doc, "panels") : kDefaultPanelsPerUnit;
}

DivideProblem load_divide_problem(const json& doc)
{
    io::check_header(doc, "divide");
    const std::size_t N = positive_dim(doc, "N");
    Pencil pencil = load_pencil(doc, N);
    StripFunction G = io::strip_function_from_json(io::require(doc, "G"), N, pencil.matrix());
    DivideProblem p{N, std::move(pencil), std::move(G), false, std::nullopt, {}, kDefaultPanelsPerUnit};
    if (doc.contains("side")) {
        const json& side = doc["side"];
        if (side != "left" && side != "right") {
            throw io::SchemaError("field \"side\" must be \"left\" or \"right\"");
        }
        p.left = side == "left";
    }
    if (doc.contains("eps")) {
        p.eps = io::require_number(doc, "eps");
    }
    p.t_points = t_points_or_default(doc);
    p.panels = panels_or_default(doc);
    return p;
}

// ||G(t) - Q(t) P(t) - R|| (right) or ||G(t) - P(t) Q(t) - R|| (left), maximized over t.
double division_residual(const StripFunction& G, const Pencil& pencil, bool left, const std::vector<double>& t_points,
                         const std::vector<Matrix>& Q, const Matrix& R)
{
    double worst = 0.0;
    for (std::size_t i = 0; i < t_points.size(); ++i) {
        const Matrix p = pencil_eval(pencil, t_points[i]);
        const Matrix qp = left ? p * Q[i] : Q[i] * p;
        worst = std::max(worst, operator_norm(G(t_points[i]) - qp - R));
    }
    return worst;
}

int cmd_divide(const std::string& input, std::optional<double> eps_flag, std::optional<int> panels_flag,
               const std::string& points_flag, const std::string& out_path, std::ostream& out)
{
    const json doc = io::read_json(input);
    DivideProblem problem = load_divide_problem(doc);
    const double eps = eps_flag ? *eps_flag : problem.eps.value_or(0.5);
    const int panels = panels_flag.value_or(problem.panels);
    if (!points_flag.empty()) {
        problem.t_points = parse_list(points_flag, "--points");
    }

    const DivisionResult res = problem.left
                                   ? contour_divide_left(problem.G, problem.pencil, eps, problem.t_points, panels)
                                   : contour_divide(problem.G, problem.pencil, eps, problem.t_points, panels);
    const double rel_tol = tolerance_from_env(kDivideTol);
    const double tol_abs = rel_tol * std::max(1.0, res.sup_bound);
    bool ok = res.residual_max <= tol_abs;

    json result = result_header("divide", doc);
    result["side"] = problem.left ? "left" : "right";
    result["eps"] = eps;
    result["panels"] = panels;
    result["quadrature_nodes"] = res.quadrature_nodes;
    result["t_points"] = res.t_points;
    result["Q"] = matrices_to_json(res.Q_values);
    result["R"] = io::matrix_to_json(res.R);
    result["residual_max"] = res.residual_max;
    result["sup_bound"] = res.sup_bound;
    result["est_Q"] = res.est_Q;
    result["est_R"] = res.est_R;
    result["max_resolvent_norm"] = res.max_resolvent_norm;
    result["relative_tolerance"] = rel_tol;
    result["tolerance"] = tol_abs;

    out << "divide: eps " << eps << ", " << panels << " panels/unit, " << res.quadrature_nodes << " nodes\n";
    out << "residual_max " << res.residual_max << " (tolerance " << tol_abs << ")\n";
    out << "est_Q " << res.est_Q << ", est_R " << res.est_R << '\n';

    if (problem.G.is_polynomial()) {
        // Exact synthetic division of G (or G^T for the left side) as the reference.
        MatrixPolynomial g = problem.G.coefficients();
        const Pencil& pencil = problem.left ? problem.pencil.transposed() : problem.pencil;
        if (problem.left) {
            for (auto& c : g) {
                c = c.transpose();
            }
        }
        auto [q_exact, r_exact] = polynomial_divide(g, pencil);
        if (problem.left) {
            r_exact = r_exact.transpose();
        }
        double q_disc = 0.0;
        for (std::size_t i = 0; i < res.t_points.size(); ++i) {
            Matrix q = q_exact.empty() ? Matrix(problem.N) : eval_polynomial(q_exact, res.t_points[i]);
            if (problem.left) {
                q = q.transpose();
            }
            q_disc = std::max(q_disc, operator_norm(q - res.Q_values[i]));
        }
        const double r_disc = operator_norm(r_exact - res.R);
        const bool agree = std::max(q_disc, r_disc) <= tol_abs;
        ok = ok && agree;
        result["polynomial_check"] = {{"Q_discrepancy", q_disc}, {"R_discrepancy", r_disc}};
        out << "polynomial check: Q discrepancy " << q_disc << ", R discrepancy " << r_disc << ' '
            << (agree ? "ok" : "FAIL") << '\n';
    }
    result["status"] = ok ? "ok" : "above tolerance";
    if (!out_path.empty()) {
        io::write_json(out_path, result);
    }
    return ok ? kOk : kVerificationFailure;
}

int verify_divide(const json& result, const json& problem_doc, std::ostream& out)
{
    const DivideProblem problem = load_divide_problem(problem_doc);
    const std::vector<double> t_points = io::number_list(io::require(result, "t_points"), "t_points");
    const std::vector<Matrix> Q = matrices_from_json(io::require(result, "Q"), problem.N, "Q");
    if (Q.size() != t_points.size()) {
        throw io::SchemaError("result: Q and t_points lengths differ");
    }
    const Matrix R = io::matrix_from_json(io::require(result, "R"), problem.N);
    const bool left = result.value("side", "right") == "left";
    const double residual = division_residual(problem.G, problem.pencil, left, t_points, Q, R);
    const double tol = io::require_number(result, "tolerance");
    const bool ok = residual <= tol;
    out << "division residual " << residual << " (tolerance " << tol << ") " << (ok ? "ok" : "FAIL") << '\n';
    return ok ? kOk : kVerificationFailure;
}

// ---- dyadic --------------------------------------------------------------

struct DyadicProblem {
    std::size_t N = 0;
    Pencil pencil;
    UniformGrid grid;
    std::vector<Matrix> samples;
    DyadicOptions options;
};

DyadicProblem load_dyadic_problem(const json& doc)
{
    io::check_header(doc, "dyadic");
    const std::size_t N = positive_dim(doc, "N");
    Pencil pencil = load_pencil(doc, N);
    const json& g = io::require(doc, "grid");
    const int count = io::require_int(g, "count");
    if (count < 4) {
        throw io::SchemaError("grid.count must be at least 4");
    }
    const UniformGrid grid{io::require_number(g, "start"), io::require_number(g, "step"),
                           static_cast<std::size_t>(count)};
    if (!(grid.step > 0.0)) {
        throw io::SchemaError("grid.step must be positive");
    }

    std::vector<Matrix> samples;
    if (doc.contains("samples")) {
        samples = matrices_from_json(doc["samples"], N, "samples");
        if (samples.size() != grid.count) {
            throw io::SchemaError("samples: expected grid.count matrices");
        }
    } else {
        const StripFunction G = io::strip_function_from_json(io::require(doc, "G"), N, pencil.matrix());
        for (std::size_t k = 0; k < grid.count; ++k) {
            samples.push_back(G(grid.at(k)));
        }
    }

    DyadicOptions options;
    if (doc.contains("J")) {
        options.bands = io::require_int(doc, "J");
    }
    if (doc.contains("window")) {
        options.window = io::require_number(doc, "window");
    }
    options.panels = panels_or_default(doc);
    return DyadicProblem{N, std::move(pencil), grid, std::move(samples), options};
}

int cmd_dyadic(const std::string& input, std::optional<int> bands_flag, const std::string& out_path, std::ostream& out)
{
    const json doc = io::read_json(input);
    DyadicProblem problem = load_dyadic_problem(doc);
    if (bands_flag) {
        problem.options.bands = *bands_flag;
    }
    const DyadicResult res = smooth_divide_dyadic(problem.samples, problem.grid, problem.pencil, problem.options);
    const double rel_tol = tolerance_from_env(kDyadicTol);
    const double tol_abs = rel_tol * std::max(1.0, res.sup_norm_G);
    const bool ok = res.residual_max <= tol_abs;

    json bands = json::array();
    out << "band  eps        modes  amplitude   norm_R      sup_norm_Q\n";
    for (const auto& b : res.bands) {
        bands.push_back({{"j", b.j},
                         {"eps", b.eps},
                         {"modes", b.modes},
                         {"amplitude", b.amplitude},
                         {"norm_R", b.norm_R},
                         {"sup_norm_Q", b.sup_norm_Q}});
        out << std::setw(4) << b.j << "  " << std::scientific << std::setprecision(3) << b.eps << "  " << std::setw(5)
            << b.modes << "  " << b.amplitude << "  " << b.norm_R << "  " << b.sup_norm_Q << '\n';
    }
    out << std::defaultfloat;
    out << "residual_max " << res.residual_max << " (tolerance " << tol_abs << ") " << (ok ? "ok" : "FAIL") << '\n';

    json result = result_header("dyadic", doc);
    result["J"] = problem.options.bands;
    result["window"] = problem.options.window;
    result["panels"] = problem.options.panels;
    result["t_points"] = res.t_points;
    result["Q"] = matrices_to_json(res.Q_values);
    result["R"] = io::matrix_to_json(res.R);
    result["bands"] = std::move(bands);
    result["residual_by_bands"] = res.residual_by_bands;
    result["residual_max"] = res.residual_max;
    result["sup_norm_G"] = res.sup_norm_G;
    result["relative_tolerance"] = rel_tol;
    result["tolerance"] = tol_abs;
    result["status"] = ok ? "ok" : "above tolerance";
    if (!out_path.empty()) {
        io::write_json(out_path, result);
    }
    return ok ? kOk : kVerificationFailure;
}

int verify_dyadic(const json& result, const json& problem_doc, std::ostream& out)
{
    const DyadicProblem problem = load_dyadic_problem(problem_doc);
    const std::vector<double> t_points = io::number_list(io::require(result, "t_points"), "t_points");
    const std::vector<Matrix> Q = matrices_from_json(io::require(result, "Q"), problem.N, "Q");
    if (Q.size() != t_points.size()) {
        throw io::SchemaError("result: Q and t_points lengths differ");
    }
    const Matrix R = io::matrix_from_json(io::require(result, "R"), problem.N);
    double residual = 0.0;
    for (std::size_t i = 0; i < t_points.size(); ++i) {
        const double k = std::round((t_points[i] - problem.grid.start) / problem.grid.step);
        if (k < 0 || k >= static_cast<double>(problem.grid.count) ||
            std::abs(problem.grid.at(static_cast<std::size_t>(k)) - t_points[i]) > 1e-9 * problem.grid.step) {
            throw io::SchemaError("result: t_points are not grid points of the problem");
        }
        const Matrix& g = problem.samples[static_cast<std::size_t>(k)];
        residual = std::max(residual, operator_norm(g - Q[i] * pencil_eval(problem.pencil, t_points[i]) - R));
    }
    const double tol = io::require_number(result, "tolerance");
    const bool ok = residual <= tol;
    out << "division residual " << residual << " (tolerance " << tol << ") " << (ok ? "ok" : "FAIL") << '\n';
    return ok ? kOk : kVerificationFailure;
}

// ---- estimate ------------------------------------------------------------

int cmd_estimate(const std::string& input, const std::string& eps_flag, double bound, const std::string& out_path,
                 std::ostream& out, std::ostream& err)
{
    const json doc = io::read_json(input);
    io::check_header(doc, "estimate");
    const std::size_t N = positive_dim(doc, "N");
    const Pencil pencil = load_pencil(doc, N);
    const json& functions = io::require(doc, "functions");
    if (!functions.is_array() || functions.empty()) {
        throw io::SchemaError("field \"functions\" must be a nonempty array");
    }
    std::vector<NamedStripFunction> family;
    for (const auto& f : functions) {
        const json& id = io::require(f, "id");
        if (!id.is_string()) {
            throw io::SchemaError("function id must be a string");
        }
        family.push_back({id.get<std::string>(), io::strip_function_from_json(io::require(f, "G"), N, pencil.matrix())});
    }
    const std::vector<double> eps_list = !eps_flag.empty() ? parse_list(eps_flag, "--eps-list")
                                                           : io::number_list(io::require(doc, "eps_list"), "eps_list");

    const EstimateTable table = estimate_report(family, pencil, eps_list, t_points_or_default(doc), panels_or_default(doc));

    std::ostringstream csv;
    csv << std::setprecision(17);
    csv << "function_id,eps,sup_norm_Q,norm_R,est_Q,est_R\n";
    for (const auto& r : table.rows) {
        csv << r.function_id << ',' << r.eps << ',' << r.sup_norm_Q << ',' << r.norm_R << ',' << r.est_Q << ','
            << r.est_R << '\n';
    }
    if (out_path.empty()) {
        out << csv.str();
    } else {
        std::ofstream f(out_path);
        if (!(f << csv.str())) {
            throw io::SchemaError("cannot write " + out_path);
        }
    }
    const bool ok = table.max_est_Q <= bound && table.max_est_R <= bound;
    (out_path.empty() ? err : out) << "max est_Q " << table.max_est_Q << ", max est_R " << table.max_est_R
                                         << " (bound " << bound << ") " << (ok ? "ok" : "FAIL") << '\n';
    return ok ? kOk : kVerificationFailure;
}

// ---- verify --------------------------------------------------------------

int cmd_verify(const std::string& result_path, const std::string& problem_path, std::ostream& out, std::ostream& err)
{
    const json result = io::read_json(result_path);
    const json problem = io::read_json(problem_path);
    if (io::require_int(result, "schema_version") != io::kSchemaVersion) {
        throw io::SchemaError("unsupported result schema_version");
    }
    const json& recorded_hash = io::require(result, "input_hash");
    const std::string actual_hash = io::content_hash(problem);
    if (recorded_hash != actual_hash) {
        err << "error: hash mismatch: result was produced from " << recorded_hash.dump() << ", problem file is "
            << actual_hash << '\n';
        return kIoError;
    }
    const std::string kind = problem_kind(result);
    if (kind == "prepare") {
        return verify_prepare(result, problem, out);
    }
    if (kind == "divide") {
        return verify_divide(result, problem, out);
    }
    if (kind == "dyadic") {
        return verify_dyadic(result, problem, out);
    }
    throw io::SchemaError("verify supports prepare, divide and dyadic results, got \"" + kind + "\"");
}

} // namespace

double tolerance_from_env(double fallback)
{
    const char* env = std::getenv("SYMPREP_TOL");
    if (env == nullptr || *env == '\0') {
        return fallback;
    }
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(env, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != std::char_traits<char>::length(env) || !(v > 0.0) || !std::isfinite(v)) {
        throw std::invalid_argument(std::string("SYMPREP_TOL must be a positive number, got \"") + env + "\"");
    }
    return v;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Symmetric preparation and division of Hermitian matrix-valued functions", "symprep"};
    app.set_version_flag("--version", std::string(SYMPREP_VERSION));
    app.require_subcommand(1);

    std::string input, out_path, gauge_file, branch = "hermitian", points, eps_list, result_path;
    std::optional<int> order, panels, bands;
    std::optional<double> eps;
    double bound = kEstimateBound;

    auto* prepare = app.add_subcommand("prepare", "Symmetric preparation F = U (tI + M) U^*");
    prepare->add_option("input", input, "Problem file")->required();
    prepare->add_option("--order", order, "Truncation order (default: P from the file)");
    prepare->add_option("--branch", branch, "hermitian or general")->check(CLI::IsMember({"hermitian", "general"}));
    prepare->add_option("--gauge-file", gauge_file, "Skew-Hermitian gauge K for the general branch");
    prepare->add_option("--out", out_path, "Result file");

    auto* divide = app.add_subcommand("divide", "Division by the pencil tI + B");
    divide->add_option("input", input, "Problem file")->required();
    divide->add_option("--eps", eps, "Contour half-height");
    divide->add_option("--panels", panels, "Quadrature panels per unit length");
    divide->add_option("--points", points, "Comma-separated evaluation points");
    divide->add_option("--out", out_path, "Result file");

    auto* dyadic = app.add_subcommand("dyadic", "Band-by-band division of a smooth decaying G");
    dyadic->add_option("input", input, "Problem file")->required();
    dyadic->add_option("--bands", bands, "Highest band index J");
    dyadic->add_option("--out", out_path, "Result file");

    auto* estimate = app.add_subcommand("estimate", "Scaled norms of Q and R over a family and eps list");
    estimate->add_option("input", input, "Problem file")->required();
    estimate->add_option("--eps-list", eps_list, "Comma-separated eps values");
    estimate->add_option("--bound", bound, "Fail if any scaled norm exceeds this");
    estimate->add_option("--out", out_path, "CSV file (default: stdout)");

    auto* verify = app.add_subcommand("verify", "Recompute residuals of a result file against its problem");
    verify->add_option("result", result_path, "Result file")->required();
    verify->add_option("problem", input, "Problem file")->required();

    std::vector<const char*> argv;
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kIoError;
    }

    try {
        if (prepare->parsed()) {
            return cmd_prepare(input, order, branch, gauge_file, out_path, out);
        }
        if (divide->parsed()) {
            return cmd_divide(input, eps, panels, points, out_path, out);
        }
        if (dyadic->parsed()) {
            return cmd_dyadic(input, bands, out_path, out);
        }
        if (estimate->parsed()) {
            return cmd_estimate(input, eps_list, bound, out_path, out, err);
        }
        return cmd_verify(result_path, input, out, err);
    } catch (const PreconditionError& e) {
        err << "error: " << e.what() << '\n';
        return kPreconditionFailure;
    } catch (const io::SchemaError& e) {
        err << "error: " << e.what() << '\n';
        return kIoError;
    } catch (const json::exception& e) {
        err << "error: " << e.what() << '\n';
        return kIoError;
    } catch (const DimensionError& e) {
        err << "error: " << e.what() << '\n';
        return kIoError;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kIoError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kVerificationFailure;
    }
}

} // namespace symprep::cli
