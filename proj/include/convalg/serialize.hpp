#pragma once

// JSON forms. Matrices and arrays are nested integer arrays, compositions flat arrays,
// rationals "p/q" strings, complex numbers [re, im] pairs.
//
// Operator file:
//   {"ground": {"kind": "exact_line"} | {"kind": "finite_set", "points": ["p/q", ...]},
//    "terms": [{"matrix": [[...], ...], "function": F}, ...]}
// ExactLine F:  {"polynomial": [[signature, "p/q"], ...]}, signature = one exponent list per
//               block, blocks (i,j) row-major.
// FiniteSet F:  {"table": [{"config": [[p, ...], ...], "value": "p/q"}, ...]}, points 1-based,
//               records in canonical order, zero values omitted.

#include <stdexcept>
#include <string>

#include <json.hpp>

#include "convalg/combinatorics.hpp"
#include "convalg/convolution.hpp"
#include "convalg/heisenberg.hpp"

namespace convalg {

using Json = nlohmann::json;

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Json to_json(const Composition& v);
Json to_json(const IntMatrix& a);
Json to_json(const TransferArray& t);
Json to_json(const Rational& q);
Json to_json(const Complex& z);
Json to_json(const ComplexMatrix& m);
Json to_json(const MonomialMatrix& m);
Json to_json(const GroundSpace& g);
Json to_json(const BlockSymFunction& f);
Json to_json(const ConvOperator& op);

IntMatrix matrix_from_json(const Json& j);
GroundSpace ground_from_json(const Json& j);
BlockSymFunction function_from_json(const Json& j, const BlockShape& shape, const GroundSpace& ground);
ConvOperator operator_from_json(const Json& j);

/// Parses text; malformed JSON or schema violations raise ParseError.
ConvOperator parse_operator(const std::string& text);
/// Canonical text (two-space indent, trailing newline).
std::string dump_operator(const ConvOperator& op);

}  // namespace convalg
