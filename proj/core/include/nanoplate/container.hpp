#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <variant>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <nlohmann/json.hpp>

namespace nanoplate {

class Deflection;

/// Named sparse matrices and dense vectors stored in one file.
///
/// Binary layout (all integers and floats little-endian):
///   magic "NPLT" | u32 version | u64 record count
///   per record: u32 name length | name bytes | u8 kind
///     kind 1 (CSR matrix): u64 rows | u64 cols | u64 nnz | row_ptr[rows+1] u64 | col_idx[nnz] u64 | values[nnz] f64
///     kind 2 (vector):     u64 size | values[size] f64
/// Records are written in name order.
class Container {
 public:
  using Matrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;
  using Record = std::variant<Matrix, Eigen::VectorXd>;

  static constexpr std::uint32_t kVersion = 1;

  void put(const std::string& name, const Eigen::SparseMatrix<double>& m);
  void put(const std::string& name, const Eigen::VectorXd& v);

  [[nodiscard]] bool has(const std::string& name) const { return records_.count(name) > 0; }
  [[nodiscard]] Eigen::SparseMatrix<double> matrix(const std::string& name) const;
  [[nodiscard]] Eigen::VectorXd vector(const std::string& name) const;
  [[nodiscard]] const std::map<std::string, Record>& records() const { return records_; }

  void write(const std::string& path) const;
  static Container read(const std::string& path);

  /// Dense-free JSON form: matrices as {rows, cols, row_ptr, col_idx, values}.
  [[nodiscard]] nlohmann::json to_json() const;
  static Container from_json(const nlohmann::json& j);

 private:
  std::map<std::string, Record> records_;
};

/// Writes `path` (binary container with the coefficient vector) and
/// `path + ".json"` (metadata sidecar).
void write_deflection(const Deflection& w, const std::string& path);

}  // namespace nanoplate
