#include "nanoplate/container.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <vector>

#include "nanoplate/error.hpp"
#include "nanoplate/solver.hpp"

namespace nanoplate {

namespace {

constexpr char kMagic[4] = {'N', 'P', 'L', 'T'};
constexpr std::uint8_t kMatrix = 1;
constexpr std::uint8_t kVector = 2;

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <class T>
T to_little(T v) {
  if constexpr (std::endian::native == std::endian::big) {
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(b[i], b[sizeof(T) - 1 - i]);
    std::memcpy(&v, b, sizeof(T));
  }
  return v;
}

class Writer {
 public:
  explicit Writer(std::ostream& os) : os_(os) {}
  template <class T>
  void put(T v) {
    v = to_little(v);
    os_.write(reinterpret_cast<const char*>(&v), sizeof(T));
  }
  void bytes(const char* p, std::size_t n) { os_.write(p, static_cast<std::streamsize>(n)); }

 private:
  std::ostream& os_;
};

class Reader {
 public:
  explicit Reader(std::vector<char> data) : data_(std::move(data)) {}
  template <class T>
  T get() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, data_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return to_little(v);
  }
  std::string str(std::size_t n) {
    need(n);
    std::string s(data_.data() + pos_, n);
    pos_ += n;
    return s;
  }
  [[nodiscard]] bool done() const { return pos_ == data_.size(); }

 private:
  void need(std::size_t n) const {
    NANOPLATE_THROW_IF(pos_ + n > data_.size(), ErrorCode::Io, "container truncated");
  }
  std::vector<char> data_;
  std::size_t pos_ = 0;
};

}  // namespace

void Container::put(const std::string& name, const Eigen::SparseMatrix<double>& m) {
  Matrix r(m);
  r.makeCompressed();
  records_[name] = std::move(r);
}

void Container::put(const std::string& name, const Eigen::VectorXd& v) { records_[name] = v; }

Eigen::SparseMatrix<double> Container::matrix(const std::string& name) const {
  auto it = records_.find(name);
  NANOPLATE_THROW_IF(it == records_.end() || !std::holds_alternative<Matrix>(it->second), ErrorCode::Io,
                     "container has no matrix named '" + name + "'");
  return Eigen::SparseMatrix<double>(std::get<Matrix>(it->second));
}

Eigen::VectorXd Container::vector(const std::string& name) const {
  auto it = records_.find(name);
  NANOPLATE_THROW_IF(it == records_.end() || !std::holds_alternative<Eigen::VectorXd>(it->second), ErrorCode::Io,
                     "container has no vector named '" + name + "'");
  return std::get<Eigen::VectorXd>(it->second);
}

void Container::write(const std::string& path) const {
  std::ofstream os(path, std::ios::binary);
  NANOPLATE_THROW_IF(!os, ErrorCode::Io, "cannot open '" + path + "' for writing");
  Writer w(os);
  w.bytes(kMagic, 4);
  w.put<std::uint32_t>(kVersion);
  w.put<std::uint64_t>(records_.size());
  for (const auto& [name, rec] : records_) {
    w.put<std::uint32_t>(static_cast<std::uint32_t>(name.size()));
    w.bytes(name.data(), name.size());
    if (const auto* m = std::get_if<Matrix>(&rec)) {
      w.put<std::uint8_t>(kMatrix);
      w.put<std::uint64_t>(static_cast<std::uint64_t>(m->rows()));
      w.put<std::uint64_t>(static_cast<std::uint64_t>(m->cols()));
      w.put<std::uint64_t>(static_cast<std::uint64_t>(m->nonZeros()));
      for (Eigen::Index i = 0; i <= m->rows(); ++i) w.put<std::uint64_t>(static_cast<std::uint64_t>(m->outerIndexPtr()[i]));
      for (Eigen::Index k = 0; k < m->nonZeros(); ++k)
        w.put<std::uint64_t>(static_cast<std::uint64_t>(m->innerIndexPtr()[k]));
      for (Eigen::Index k = 0; k < m->nonZeros(); ++k) w.put<double>(m->valuePtr()[k]);
    } else {
      const auto& v = std::get<Eigen::VectorXd>(rec);
      w.put<std::uint8_t>(kVector);
      w.put<std::uint64_t>(static_cast<std::uint64_t>(v.size()));
      for (Eigen::Index k = 0; k < v.size(); ++k) w.put<double>(v[k]);
    }
  }
  NANOPLATE_THROW_IF(!os, ErrorCode::Io, "write to '" + path + "' failed");
}

Container Container::read(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  NANOPLATE_THROW_IF(!is, ErrorCode::Io, "cannot open '" + path + "'");
  Reader r(std::vector<char>(std::istreambuf_iterator<char>(is), {}));
  NANOPLATE_THROW_IF(r.str(4) != std::string(kMagic, 4), ErrorCode::Io, "'" + path + "' is not a nanoplate container");
  const auto version = r.get<std::uint32_t>();
  NANOPLATE_THROW_IF(version != kVersion, ErrorCode::Io, "unsupported container version " + std::to_string(version));
  Container c;
  const auto count = r.get<std::uint64_t>();
  for (std::uint64_t i = 0; i < count; ++i) {
    const std::string name = r.str(r.get<std::uint32_t>());
    const auto kind = r.get<std::uint8_t>();
    if (kind == kMatrix) {
      const auto rows = static_cast<Eigen::Index>(r.get<std::uint64_t>());
      const auto cols = static_cast<Eigen::Index>(r.get<std::uint64_t>());
      const auto nnz = static_cast<Eigen::Index>(r.get<std::uint64_t>());
      std::vector<Eigen::Index> row_ptr(static_cast<std::size_t>(rows + 1));
      std::vector<Eigen::Index> col(static_cast<std::size_t>(nnz));
      for (auto& v : row_ptr) v = static_cast<Eigen::Index>(r.get<std::uint64_t>());
      for (auto& v : col) v = static_cast<Eigen::Index>(r.get<std::uint64_t>());
      std::vector<Eigen::Triplet<double>> t;
      t.reserve(static_cast<std::size_t>(nnz));
      for (Eigen::Index row = 0; row < rows; ++row)
        for (Eigen::Index k = row_ptr[row]; k < row_ptr[row + 1]; ++k) {
          NANOPLATE_THROW_IF(k >= nnz || col[k] >= cols, ErrorCode::Io, "corrupt CSR record '" + name + "'");
          t.emplace_back(row, col[k], 0.0);
        }
      Matrix m(rows, cols);
      std::vector<double> values(static_cast<std::size_t>(nnz));
      for (auto& v : values) v = r.get<double>();
      for (std::size_t k = 0; k < t.size(); ++k) t[k] = {t[k].row(), t[k].col(), values[k]};
      m.setFromTriplets(t.begin(), t.end());
      m.makeCompressed();
      c.records_[name] = std::move(m);
    } else if (kind == kVector) {
      const auto n = static_cast<Eigen::Index>(r.get<std::uint64_t>());
      Eigen::VectorXd v(n);
      for (Eigen::Index k = 0; k < n; ++k) v[k] = r.get<double>();
      c.records_[name] = std::move(v);
    } else {
      throw Error(ErrorCode::Io, "unknown record kind in container");
    }
  }
  NANOPLATE_THROW_IF(!r.done(), ErrorCode::Io, "trailing bytes in container");
  return c;
}

nlohmann::json Container::to_json() const {
  nlohmann::json out = nlohmann::json::object();
  out["version"] = kVersion;
  nlohmann::json recs = nlohmann::json::object();
  for (const auto& [name, rec] : records_) {
    if (const auto* m = std::get_if<Matrix>(&rec)) {
      std::vector<long long> row_ptr(m->outerIndexPtr(), m->outerIndexPtr() + m->rows() + 1);
      std::vector<long long> col(m->innerIndexPtr(), m->innerIndexPtr() + m->nonZeros());
      std::vector<double> val(m->valuePtr(), m->valuePtr() + m->nonZeros());
      recs[name] = {{"kind", "csr"}, {"rows", m->rows()}, {"cols", m->cols()},
                    {"row_ptr", row_ptr}, {"col_idx", col}, {"values", val}};
    } else {
      const auto& v = std::get<Eigen::VectorXd>(rec);
      recs[name] = {{"kind", "vector"}, {"values", std::vector<double>(v.data(), v.data() + v.size())}};
    }
  }
  out["records"] = std::move(recs);
  return out;
}

Container Container::from_json(const nlohmann::json& j) {
  Container c;
  try {
    for (const auto& [name, rec] : j.at("records").items()) {
      if (rec.at("kind") == "csr") {
        const auto rows = rec.at("rows").get<Eigen::Index>();
        const auto cols = rec.at("cols").get<Eigen::Index>();
        const auto row_ptr = rec.at("row_ptr").get<std::vector<Eigen::Index>>();
        const auto col = rec.at("col_idx").get<std::vector<Eigen::Index>>();
        const auto val = rec.at("values").get<std::vector<double>>();
        std::vector<Eigen::Triplet<double>> t;
        for (Eigen::Index row = 0; row < rows; ++row)
          for (Eigen::Index k = row_ptr.at(row); k < row_ptr.at(row + 1); ++k) t.emplace_back(row, col.at(k), val.at(k));
        Matrix m(rows, cols);
        m.setFromTriplets(t.begin(), t.end());
        c.records_[name] = std::move(m);
      } else {
        const auto val = rec.at("values").get<std::vector<double>>();
        c.records_[name] = Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(val.data(), static_cast<Eigen::Index>(val.size())));
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Io, std::string("malformed container JSON: ") + e.what());
  }
  return c;
}

void write_deflection(const Deflection& w, const std::string& path) {
  Container c;
  c.put("w", w.coefficients());
  c.write(path);
  const SplineSpace& s = w.space();
  nlohmann::json meta = {
      {"kappa", w.meta().kappa},
      {"material_hash", w.meta().material_hash},
      {"f", w.meta().f},
      {"P0", {w.meta().P0.x, w.meta().P0.y}},
      {"space",
       {{"Lx", s.domain().Lx},
        {"Ly", s.domain().Ly},
        {"rho0", s.domain().rho0},
        {"degree", s.degree()},
        {"spans", {s.spans_x(), s.spans_y()}},
        {"clamp_layers", s.clamp_layers()},
        {"dofs", s.num_active()}}},
  };
  std::ofstream os(path + ".json");
  NANOPLATE_THROW_IF(!os, ErrorCode::Io, "cannot write sidecar for '" + path + "'");
  os << meta.dump(2) << '\n';
}

}  // namespace nanoplate
