#include "nanoplate/bspline.hpp"

#include <algorithm>
#include <cmath>

#include "nanoplate/error.hpp"

namespace nanoplate {

BSplineBasis::BSplineBasis(int degree, int spans, double length) : p_(degree), n_(spans), L_(length) {
  NANOPLATE_THROW_IF(degree < 0, ErrorCode::InvalidParameter, "spline degree must be nonnegative");
  NANOPLATE_THROW_IF(spans < 1, ErrorCode::InsufficientDofs, "spline basis needs at least one span");
  NANOPLATE_THROW_IF(!(length > 0.0), ErrorCode::InvalidParameter, "spline interval length must be positive");
  knots_.reserve(static_cast<std::size_t>(n_ + 2 * p_ + 1));
  for (int i = 0; i < p_; ++i) knots_.push_back(0.0);
  for (int i = 0; i <= n_; ++i) knots_.push_back(breakpoint(i));
  for (int i = 0; i < p_; ++i) knots_.push_back(L_);
}

int BSplineBasis::find_span(double x) const {
  const int s = static_cast<int>(std::floor(x / L_ * n_));
  return std::clamp(s, 0, n_ - 1);
}

// Piegl & Tiller, The NURBS Book, algorithm A2.3, with the span index shifted
// so that span s covers [knots[s+p], knots[s+p+1]].
void BSplineBasis::derivatives(int span, double x, int order, double* out) const {
  const int p = p_;
  const int i = span + p;
  const int nd = std::min(order, p);
  std::vector<double> left(p + 1), right(p + 1);
  std::vector<double> ndu((p + 1) * (p + 1));
  auto NDU = [&](int r, int c) -> double& { return ndu[r * (p + 1) + c]; };
  NDU(0, 0) = 1.0;
  for (int j = 1; j <= p; ++j) {
    left[j] = x - knots_[i + 1 - j];
    right[j] = knots_[i + j] - x;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      NDU(j, r) = right[r + 1] + left[j - r];
      const double temp = NDU(r, j - 1) / NDU(j, r);
      NDU(r, j) = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    NDU(j, j) = saved;
  }
  for (int k = 0; k <= order; ++k)
    for (int a = 0; a <= p; ++a) out[k * (p + 1) + a] = 0.0;
  for (int a = 0; a <= p; ++a) out[a] = NDU(a, p);

  std::vector<double> A(2 * (p + 1));
  auto AA = [&](int s, int c) -> double& { return A[s * (p + 1) + c]; };
  for (int r = 0; r <= p; ++r) {
    int s1 = 0, s2 = 1;
    AA(0, 0) = 1.0;
    for (int k = 1; k <= nd; ++k) {
      double d = 0.0;
      const int rk = r - k;
      const int pk = p - k;
      if (r >= k) {
        AA(s2, 0) = AA(s1, 0) / NDU(pk + 1, rk);
        d = AA(s2, 0) * NDU(rk, pk);
      }
      const int j1 = rk >= -1 ? 1 : -rk;
      const int j2 = (r - 1 <= pk) ? k - 1 : p - r;
      for (int j = j1; j <= j2; ++j) {
        AA(s2, j) = (AA(s1, j) - AA(s1, j - 1)) / NDU(pk + 1, rk + j);
        d += AA(s2, j) * NDU(rk + j, pk);
      }
      if (r <= pk) {
        AA(s2, k) = -AA(s1, k - 1) / NDU(pk + 1, r);
        d += AA(s2, k) * NDU(r, pk);
      }
      out[k * (p + 1) + r] = d;
      std::swap(s1, s2);
    }
  }
  int factor = p;
  for (int k = 1; k <= nd; ++k) {
    for (int a = 0; a <= p; ++a) out[k * (p + 1) + a] *= factor;
    factor *= (p - k);
  }
}

double BSplineBasis::greville(int i) const {
  double s = 0.0;
  for (int k = 1; k <= p_; ++k) s += knots_[i + k];
  return p_ > 0 ? s / p_ : 0.5 * (knots_[i] + knots_[i + 1]);
}

}  // namespace nanoplate
