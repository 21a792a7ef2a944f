#pragma once

// Shared matrix JSON format: {"dim": d, "re": [[...]], "im": [[...]]}, row-major.
// Readers symmetrize and validate; "im" may be omitted for real matrices.

#include "steinmix/operator_core.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace steinmix {

using Json = nlohmann::json;

Json matrix_to_json(const ComplexMatrix& m);
inline Json to_json(const HermitianOperator& h) { return matrix_to_json(h.matrix()); }
inline Json to_json(const DensityMatrix& rho) { return matrix_to_json(rho.matrix()); }
inline Json to_json(const TestOperator& t) { return matrix_to_json(t.matrix()); }

ComplexMatrix matrix_from_json(const Json& j);
HermitianOperator hermitian_from_json(const Json& j);
DensityMatrix density_from_json(const Json& j);

/// Parses a JSON file; throws ValidationError with the path on failure.
Json read_json_file(const std::filesystem::path& path);

/// Real number that may be ±∞: finite values as numbers, infinities as "inf"/"-inf".
Json extended_real_to_json(double x);
double extended_real_from_json(const Json& j);

}  // namespace steinmix
