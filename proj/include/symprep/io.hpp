#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "symprep/division.hpp"
#include "symprep/matrix.hpp"
#include "symprep/series.hpp"

namespace symprep::io {

using nlohmann::json;

inline constexpr int kSchemaVersion = 1;

/// Malformed or unreadable files; the CLI maps this to exit code 1.
class SchemaError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// {"re": [[...]], "im": [[...]]}; "im" may be omitted on input.
json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const json& j, std::size_t dim);

/// List of {"j", "alpha", "re", "im"} records in graded-lex order.
json series_to_json(const MSeries& s);
/// Records with total degree above `order` are dropped.
MSeries series_from_json(const json& records, std::size_t num_vars, std::size_t dim, int order);

/// FNV-1a 64-bit hash of the canonical (sorted-key, compact) dump, as "fnv1a64:<hex>".
std::string content_hash(const json& j);

json read_json(const std::filesystem::path& path);
/// Writes `j` with two-space indentation and a trailing newline.
void write_json(const std::filesystem::path& path, const json& j);

/// Field access with schema errors naming the field.
const json& require(const json& obj, const char* key);
double require_number(const json& obj, const char* key);
int require_int(const json& obj, const char* key);
std::vector<double> number_list(const json& arr, const char* what);

/// Checks schema_version and kind.
void check_header(const json& doc, const char* expected_kind);

/// G given as {"type": "polynomial", "coefficients": [...]} or
/// {"type": "builtin", "name": ..., "params": {...}}.
StripFunction strip_function_from_json(const json& desc, std::size_t dim, const Matrix& pencil_matrix);

} // namespace symprep::io
