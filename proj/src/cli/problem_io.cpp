#include "symprep/io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "symprep/linalg.hpp"

namespace symprep::io {

json matrix_to_json(const Matrix& m)
{
    json re = json::array();
    json im = json::array();
    for (std::size_t r = 0; r < m.dim(); ++r) {
        json re_row = json::array();
        json im_row = json::array();
        for (std::size_t c = 0; c < m.dim(); ++c) {
            re_row.push_back(m(r, c).real());
            im_row.push_back(m(r, c).imag());
        }
        re.push_back(std::move(re_row));
        im.push_back(std::move(im_row));
    }
    return json{{"re", std::move(re)}, {"im", std::move(im)}};
}

namespace {

void read_part(const json& rows, std::size_t dim, Matrix& m, bool imag)
{
    if (!rows.is_array() || rows.size() != dim) {
        throw SchemaError("matrix: expected " + std::to_string(dim) + " rows");
    }
    for (std::size_t r = 0; r < dim; ++r) {
        const json& row = rows[r];
        if (!row.is_array() || row.size() != dim) {
            throw SchemaError("matrix: row " + std::to_string(r) + " must have " + std::to_string(dim) + " entries");
        }
        for (std::size_t c = 0; c < dim; ++c) {
            if (!row[c].is_number()) {
                throw SchemaError("matrix: non-numeric entry");
            }
            const double v = row[c].get<double>();
            if (!std::isfinite(v)) {
                throw SchemaError("matrix: non-finite entry");
            }
            if (imag) {
                m(r, c).imag(v);
            } else {
                m(r, c).real(v);
            }
        }
    }
}

} // namespace

Matrix matrix_from_json(const json& j, std::size_t dim)
{
    if (!j.is_object() || !j.contains("re")) {
        throw SchemaError("matrix: expected an object with \"re\" (and optional \"im\")");
    }
    Matrix m(dim);
    read_part(j["re"], dim, m, false);
    if (j.contains("im")) {
        read_part(j["im"], dim, m, true);
    }
    return m;
}

json series_to_json(const MSeries& s)
{
    json out = json::array();
    for (const auto& [idx, c] : s) {
        json rec = matrix_to_json(c);
        rec["j"] = idx.j;
        rec["alpha"] = idx.alpha;
        out.push_back(std::move(rec));
    }
    return out;
}

MSeries series_from_json(const json& records, std::size_t num_vars, std::size_t dim, int order)
{
    if (!records.is_array()) {
        throw SchemaError("coefficients: expected an array of records");
    }
    MSeries s(num_vars, dim, order);
    for (const auto& rec : records) {
        MultiIndex idx;
        idx.j = require_int(rec, "j");
        const json& alpha = require(rec, "alpha");
        if (!alpha.is_array() || alpha.size() != num_vars) {
            throw SchemaError("coefficient record: alpha must have " + std::to_string(num_vars) + " entries");
        }
        for (const auto& a : alpha) {
            if (!a.is_number_integer() || a.get<int>() < 0) {
                throw SchemaError("coefficient record: alpha entries must be nonnegative integers");
            }
            idx.alpha.push_back(a.get<int>());
        }
        if (idx.j < 0) {
            throw SchemaError("coefficient record: j must be nonnegative");
        }
        if (idx.total() <= order) {
            s.accumulate(idx, matrix_from_json(rec, dim));
        }
    }
    return s;
}

std::string content_hash(const json& j)
{
    const std::string text = j.dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    std::ostringstream os;
    os << "fnv1a64:" << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

json read_json(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw SchemaError("cannot open " + path.string());
    }
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw SchemaError(path.string() + ": " + e.what());
    }
}

void write_json(const std::filesystem::path& path, const json& j)
{
    std::ofstream out(path);
    if (!out) {
        throw SchemaError("cannot write " + path.string());
    }
    out << j.dump(2) << '\n';
    if (!out) {
        throw SchemaError("write failed for " + path.string());
    }
}

const json& require(const json& obj, const char* key)
{
    if (!obj.is_object() || !obj.contains(key)) {
        throw SchemaError(std::string("missing field \"") + key + "\"");
    }
    return obj[key];
}

double require_number(const json& obj, const char* key)
{
    const json& v = require(obj, key);
    if (!v.is_number()) {
        throw SchemaError(std::string("field \"") + key + "\" must be a number");
    }
    return v.get<double>();
}

int require_int(const json& obj, const char* key)
{
    const json& v = require(obj, key);
    if (!v.is_number_integer()) {
        throw SchemaError(std::string("field \"") + key + "\" must be an integer");
    }
    return v.get<int>();
}

std::vector<double> number_list(const json& arr, const char* what)
{
    if (!arr.is_array()) {
        throw SchemaError(std::string(what) + " must be an array of numbers");
    }
    std::vector<double> out;
    for (const auto& v : arr) {
        if (!v.is_number()) {
            throw SchemaError(std::string(what) + " must be an array of numbers");
        }
        out.push_back(v.get<double>());
    }
    return out;
}

void check_header(const json& doc, const char* expected_kind)
{
    if (require_int(doc, "schema_version") != kSchemaVersion) {
        throw SchemaError("unsupported schema_version (expected " + std::to_string(kSchemaVersion) + ")");
    }
    const json& kind = require(doc, "kind");
    if (!kind.is_string() || kind.get<std::string>() != expected_kind) {
        throw SchemaError(std::string("expected kind \"") + expected_kind + "\"");
    }
}

namespace {

double param(const json& params, const char* key, double fallback)
{
    if (!params.is_object() || !params.contains(key)) {
        return fallback;
    }
    if (!params[key].is_number()) {
        throw SchemaError(std::string("builtin parameter \"") + key + "\" must be a number");
    }
    return params[key].get<double>();
}

MatrixPolynomial polynomial_from_json(const json& coeffs, std::size_t dim)
{
    if (!coeffs.is_array() || coeffs.empty()) {
        throw SchemaError("polynomial G: \"coefficients\" must be a nonempty array of matrices");
    }
    MatrixPolynomial g;
    for (const auto& c : coeffs) {
        g.push_back(matrix_from_json(c, dim));
    }
    return g;
}

// (t I + B)^k
MatrixPolynomial pencil_power(const Matrix& b, int k)
{
    MatrixPolynomial p{Matrix::identity(b.dim())};
    for (int step = 0; step < k; ++step) {
        MatrixPolynomial next(p.size() + 1, Matrix(b.dim()));
        for (std::size_t i = 0; i < p.size(); ++i) {
            next[i + 1] += p[i];
            next[i] += p[i] * b;
        }
        p = std::move(next);
    }
    return p;
}

} // namespace

StripFunction strip_function_from_json(const json& desc, std::size_t dim, const Matrix& pencil_matrix)
{
    const json& type = require(desc, "type");
    if (type == "polynomial") {
        return StripFunction::polynomial(polynomial_from_json(require(desc, "coefficients"), dim));
    }
    if (type != "builtin") {
        throw SchemaError("G.type must be \"polynomial\" or \"builtin\"");
    }
    const json& name_j = require(desc, "name");
    if (!name_j.is_string()) {
        throw SchemaError("G.name must be a string");
    }
    const std::string name = name_j.get<std::string>();
    const json params = desc.contains("params") ? desc["params"] : json::object();
    const Matrix scale = desc.contains("matrix") ? matrix_from_json(desc["matrix"], dim) : Matrix::identity(dim);
    const double scale_norm = std::max(operator_norm(scale), 1e-300);

    if (name == "t_power") {
        const int k = static_cast<int>(param(params, "k", 2));
        if (k < 0) {
            throw SchemaError("t_power: k must be nonnegative");
        }
        MatrixPolynomial g(static_cast<std::size_t>(k) + 1, Matrix(dim));
        g[static_cast<std::size_t>(k)] = scale;
        return StripFunction::polynomial(std::move(g));
    }
    if (name == "pencil_power") {
        const int k = static_cast<int>(param(params, "k", 1));
        if (k < 0) {
            throw SchemaError("pencil_power: k must be nonnegative");
        }
        return StripFunction::polynomial(pencil_power(pencil_matrix, k));
    }

    const double width = param(params, "strip", 1.0);
    if (name == "gaussian") {
        const double rate = param(params, "rate", 1.0);
        return StripFunction::sampler(
            dim, [scale, rate](complex t) { return scale * std::exp(-rate * t * t); }, width,
            scale_norm * std::exp(rate * width * width));
    }
    if (name == "sin" || name == "cos") {
        const double freq = param(params, "freq", 1.0);
        const bool is_sin = name == "sin";
        return StripFunction::sampler(
            dim, [scale, freq, is_sin](complex t) { return scale * (is_sin ? std::sin(freq * t) : std::cos(freq * t)); },
            width, scale_norm * std::cosh(std::abs(freq) * width));
    }
    throw SchemaError("unknown builtin G \"" + name + "\" (known: t_power, pencil_power, gaussian, sin, cos)");
}

} // namespace symprep::io
