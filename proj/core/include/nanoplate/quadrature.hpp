#pragma once

#include <vector>

namespace nanoplate {

/// Gauss-Legendre rule with n points on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussRule gauss_legendre(int n);

/// The rule mapped to [a, b].
GaussRule gauss_legendre(int n, double a, double b);

}  // namespace nanoplate
