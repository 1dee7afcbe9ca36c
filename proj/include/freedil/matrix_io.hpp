#pragma once

// JSON encodings of matrices and states.
//
//   matrix: {"rows": r, "cols": c, "data": [[[re, im], ...], ...]}
//   state:  {"kind": "vector",  "dim": d, "data": [[re, im], ...]}
//           {"kind": "density", "dim": d, "data": [[[re, im], ...], ...]}
//
// Doubles are written with round-trip precision, so parse(emit(x)) == x bit for bit.

#include <string>

#include "json.hpp"

#include "freedil/operator_core.hpp"

namespace freedil {

using Json = nlohmann::json;

Json matrix_to_json(const ComplexMatrix& m);
// `where` prefixes error messages (typically a JSON pointer).
ComplexMatrix matrix_from_json(const Json& j, const std::string& where = "matrix");

Json vector_to_json(const ComplexVector& v);
ComplexVector vector_from_json(const Json& j, const std::string& where = "vector");

Json state_to_json(const State& s);
State state_from_json(const Json& j, double tol = kDefaultTol, const std::string& where = "state");

Json complex_to_json(Complex z);
Complex complex_from_json(const Json& j, const std::string& where);

// Reads and parses a JSON file; parse errors carry line and column.
Json read_json_file(const std::string& path);

} // namespace freedil
