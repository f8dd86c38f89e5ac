#pragma once

#include <array>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "nanoplate/expression.hpp"
#include "nanoplate/geometry.hpp"

namespace nanoplate {

/// Mixed partial derivatives d^(i+j) u / dx^i dy^j for i + j <= order.
class Partials {
 public:
  static constexpr int kMaxOrder = 8;

  Partials() = default;
  explicit Partials(int order) : order_(order) {}

  [[nodiscard]] int order() const { return order_; }
  [[nodiscard]] double operator()(int nx, int ny) const { return data_[index(nx, ny)]; }
  double& operator()(int nx, int ny) { return data_[index(nx, ny)]; }

  /// Squared Frobenius norm of the full k-th gradient tensor; each mixed
  /// partial appears binomial(k, ny) times in the tensor.
  [[nodiscard]] double gradient_norm_sq(int k) const;

 private:
  static constexpr int index(int nx, int ny) { return nx * (kMaxOrder + 1) + ny; }
  int order_ = 0;
  std::array<double, (kMaxOrder + 1) * (kMaxOrder + 1)> data_{};
};

double binomial(int n, int k);

/// A scalar function on the plate with derivatives up to max_order().
/// Implementations are immutable and safe to evaluate concurrently.
class ScalarField {
 public:
  virtual ~ScalarField() = default;

  [[nodiscard]] virtual double value(Point p) const { return partials(p, 0)(0, 0); }
  [[nodiscard]] virtual Partials partials(Point p, int order) const = 0;
  [[nodiscard]] virtual int max_order() const = 0;
  [[nodiscard]] virtual bool is_constant() const { return false; }
  /// Short human-readable description recorded in metadata.
  [[nodiscard]] virtual std::string describe() const { return "field"; }
};

using FieldPtr = std::shared_ptr<const ScalarField>;

class ConstantField final : public ScalarField {
 public:
  explicit ConstantField(double c) : c_(c) {}
  [[nodiscard]] double value(Point) const override { return c_; }
  [[nodiscard]] Partials partials(Point p, int order) const override;
  [[nodiscard]] int max_order() const override { return Partials::kMaxOrder; }
  [[nodiscard]] bool is_constant() const override { return true; }
  [[nodiscard]] std::string describe() const override;

 private:
  double c_;
};

/// Closed-form field; derivatives up to third order are precomputed symbolically.
class ExpressionField final : public ScalarField {
 public:
  explicit ExpressionField(Expression expr);
  static std::shared_ptr<ExpressionField> parse(const std::string& text);

  [[nodiscard]] double value(Point p) const override { return table_[0][0](p); }
  [[nodiscard]] Partials partials(Point p, int order) const override;
  [[nodiscard]] int max_order() const override { return kOrder; }
  [[nodiscard]] bool is_constant() const override { return constant_; }
  [[nodiscard]] const Expression& expression() const { return table_[0][0]; }
  [[nodiscard]] std::string describe() const override { return table_[0][0].to_string(); }

 private:
  static constexpr int kOrder = 3;
  std::array<std::array<Expression, kOrder + 1>, kOrder + 1> table_;
  bool constant_ = false;
};

/// Samples on a uniform (nx x ny) node grid over [0,Lx] x [0,Ly] with bilinear
/// interpolation. Node (i, j) sits at (i Lx/(nx-1), j Ly/(ny-1)); values are
/// stored row-major with j the row index.
class GridField final : public ScalarField {
 public:
  GridField(int nx, int ny, double Lx, double Ly, std::vector<double> values);

  /// Plain-text format: header line `nx ny Lx Ly`, then nx*ny values row-major.
  static std::shared_ptr<GridField> load(const std::string& path);

  [[nodiscard]] double value(Point p) const override;
  [[nodiscard]] Partials partials(Point p, int order) const override;
  [[nodiscard]] int max_order() const override { return 1; }
  [[nodiscard]] std::string describe() const override;

 private:
  int nx_, ny_;
  double Lx_, Ly_;
  std::vector<double> values_;
};

/// Adapter for analytic fields written as callables (tests, manufactured solutions).
class FunctionField final : public ScalarField {
 public:
  using Fn = std::function<Partials(Point, int)>;
  FunctionField(Fn fn, int max_order) : fn_(std::move(fn)), max_order_(max_order) {}
  [[nodiscard]] Partials partials(Point p, int order) const override { return fn_(p, order); }
  [[nodiscard]] int max_order() const override { return max_order_; }

 private:
  Fn fn_;
  int max_order_;
};

/// Sum a*f + b*g of two fields; used for differences of deflections.
class LinearCombinationField final : public ScalarField {
 public:
  LinearCombinationField(double a, FieldPtr f, double b, FieldPtr g);
  [[nodiscard]] Partials partials(Point p, int order) const override;
  [[nodiscard]] int max_order() const override;

 private:
  double a_, b_;
  FieldPtr f_, g_;
};

/// Parses a field given as a plain number or a formula in x and y.
FieldPtr make_field(const std::string& text);

}  // namespace nanoplate
