#pragma once

#include <memory>
#include <string>

#include "nanoplate/geometry.hpp"

namespace nanoplate {

/// Closed-form scalar expression in the plane coordinates `x` and `y`.
///
/// Grammar: numbers, `x`, `y`, `pi`, `+ - * / ^`, parentheses, unary minus and
/// the functions sin, cos, tan, exp, log, sqrt, tanh, abs. Expressions are
/// immutable and can be differentiated symbolically, which is how material and
/// foundation fields given as formulas provide gradients.
class Expression {
 public:
  struct Node;

  Expression();  // the constant 0
  static Expression parse(const std::string& text);
  static Expression constant(double value);

  [[nodiscard]] double operator()(Point p) const;
  [[nodiscard]] Expression derivative(char variable) const;
  [[nodiscard]] bool is_constant() const;
  [[nodiscard]] std::string to_string() const;

 private:
  explicit Expression(std::shared_ptr<const Node> root) : root_(std::move(root)) {}
  std::shared_ptr<const Node> root_;
};

}  // namespace nanoplate
