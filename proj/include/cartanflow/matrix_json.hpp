#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "cartanflow/linalg.hpp"

namespace cartanflow {

// Matrix interchange format used by every tool:
//   {"rows": R, "cols": C, "data": [[re, im], ...]}   (row-major)
// Doubles are written in shortest round-trip form, so finite values survive a
// write/read cycle bit for bit.

nlohmann::json matrix_to_json(const Cmat& m);

/// Throws ValidationError on malformed input (missing keys, wrong data length,
/// non-numeric entries).
Cmat matrix_from_json(const nlohmann::json& j);

Cmat read_matrix_file(const std::string& path);

}  // namespace cartanflow
