#include "cartanflow/matrix_json.hpp"

#include <fstream>

#include "cartanflow/errors.hpp"

namespace cartanflow {

nlohmann::json matrix_to_json(const Cmat& m) {
  nlohmann::json data = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      data.push_back({m(i, j).real(), m(i, j).imag()});
    }
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

Cmat matrix_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("rows") || !j.contains("cols") || !j.contains("data")) {
    throw ValidationError("matrix json: expected object with rows, cols, data");
  }
  if (!j["rows"].is_number_integer() || !j["cols"].is_number_integer()) {
    throw ValidationError("matrix json: rows/cols must be integers");
  }
  const auto rows = j["rows"].get<long long>();
  const auto cols = j["cols"].get<long long>();
  if (rows <= 0 || cols <= 0) {
    throw ValidationError("matrix json: rows/cols must be positive");
  }
  const auto& data = j["data"];
  if (!data.is_array() || static_cast<long long>(data.size()) != rows * cols) {
    throw ValidationError("matrix json: data must hold rows*cols entries");
  }
  Cmat m(rows, cols);
  for (long long k = 0; k < rows * cols; ++k) {
    const auto& e = data[static_cast<std::size_t>(k)];
    if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
      throw ValidationError("matrix json: entry " + std::to_string(k) + " is not [re, im]");
    }
    m(k / cols, k % cols) = Complex(e[0].get<double>(), e[1].get<double>());
  }
  return m;
}

Cmat read_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open matrix file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("matrix file " + path + ": " + e.what());
  }
  return matrix_from_json(j);
}

}  // namespace cartanflow
