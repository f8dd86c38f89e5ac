#pragma once

#include <vector>

namespace nanoplate {

/// Univariate B-spline basis of degree p on [0, L] with an open uniform knot
/// vector and n spans, i.e. n + p basis functions.
class BSplineBasis {
 public:
  BSplineBasis(int degree, int spans, double length);

  [[nodiscard]] int degree() const { return p_; }
  [[nodiscard]] int spans() const { return n_; }
  [[nodiscard]] double length() const { return L_; }
  [[nodiscard]] int size() const { return n_ + p_; }
  [[nodiscard]] double span_width() const { return L_ / n_; }
  [[nodiscard]] double breakpoint(int i) const { return L_ * i / n_; }
  [[nodiscard]] const std::vector<double>& knots() const { return knots_; }

  /// Span index containing x (the last span for x == L). x must lie in [0, L].
  [[nodiscard]] int find_span(double x) const;

  /// Derivatives of the p+1 functions nonzero on `span` at x:
  /// out[k * (p+1) + a] = d^k/dx^k N_{span + a}(x), k = 0..order.
  void derivatives(int span, double x, int order, double* out) const;

  /// Support [lo, hi] of global basis function i.
  [[nodiscard]] double support_begin(int i) const { return knots_[i]; }
  [[nodiscard]] double support_end(int i) const { return knots_[i + p_ + 1]; }

  /// Greville abscissa of basis function i.
  [[nodiscard]] double greville(int i) const;

 private:
  int p_;
  int n_;
  double L_;
  std::vector<double> knots_;
};

}  // namespace nanoplate
