#pragma once

// JSON interchange for matrices plus the canonical writer used by every
// artifact the CLI emits (sorted keys, 17 significant digits).

#include <string>

#include <json.hpp>

#include "pom/operator_core.hpp"

namespace pom::io {

using json = nlohmann::json;

/// {"dim": d, "entries": [[re, im], ...]} flattened row-major.
json matrix_to_json(const ComplexMatrix& m);

/// Inverse of matrix_to_json. `field` names the location for ParseError
/// messages. Entry components may be JSON numbers or decimal strings.
ComplexMatrix matrix_from_json(const json& j, const std::string& field = "matrix");

/// Deterministic serialization: object keys sorted, floating-point values
/// printed with 17 significant digits, arrays of scalars kept on one line.
std::string canonical_dump(const json& j);

std::string format_double(double v);

json parse_json_text(const std::string& text, const std::string& source);
json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace pom::io
