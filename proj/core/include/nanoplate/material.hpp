#pragma once

#include <array>
#include <optional>

#include <Eigen/Dense>

#include "nanoplate/field.hpp"
#include "nanoplate/geometry.hpp"

namespace nanoplate {

/// Second-order tensor over the index range {0,1}.
struct Tensor2 {
  std::array<double, 4> v{};
  double& operator()(int i, int j) { return v[2 * i + j]; }
  double operator()(int i, int j) const { return v[2 * i + j]; }
};

/// Third-order tensor over {0,1}.
struct Tensor3 {
  std::array<double, 8> v{};
  double& operator()(int i, int j, int k) { return v[4 * i + 2 * j + k]; }
  double operator()(int i, int j, int k) const { return v[4 * i + 2 * j + k]; }
};

/// Fourth-order tensor acting on Tensor2 by contraction over the last two indices.
struct Tensor4 {
  std::array<double, 16> v{};
  double& operator()(int i, int j, int l, int m) { return v[8 * i + 4 * j + 2 * l + m]; }
  double operator()(int i, int j, int l, int m) const { return v[8 * i + 4 * j + 2 * l + m]; }
};

/// Sixth-order tensor acting on Tensor3 by contraction over the last three indices.
struct Tensor6 {
  std::array<double, 64> v{};
  double& operator()(int i, int j, int k, int l, int m, int n) { return v[32 * i + 16 * j + 8 * k + 4 * l + 2 * m + n]; }
  double operator()(int i, int j, int k, int l, int m, int n) const {
    return v[32 * i + 16 * j + 8 * k + 4 * l + 2 * m + n];
  }
};

Tensor2 apply_rank4(const Tensor4& T, const Tensor2& A);
Tensor3 apply_rank6(const Tensor6& T, const Tensor3& B);
double inner(const Tensor2& A, const Tensor2& B);
double inner(const Tensor3& A, const Tensor3& B);
Tensor4 operator+(const Tensor4& a, const Tensor4& b);

/// Lamé fields, thickness and the three material length scales of the
/// strain-gradient plate model.
struct MaterialParams {
  double rho0 = 1.0;
  double t = 0.1;
  double l0 = 0.1;
  double l1 = 0.1;
  double l2 = 0.1;
  double alpha0 = 0.5;
  double gamma0 = 0.5;
  FieldPtr mu;
  FieldPtr lambda;

  [[nodiscard]] double l() const;
  /// Checks the scalar invariants (positivity of lengths and floors).
  void validate() const;
  /// Checks the pointwise ellipticity floors mu >= alpha0, 2 mu + 3 lambda >= gamma0.
  void check_point(Point x) const;
  [[nodiscard]] bool is_homogeneous() const;
};

struct Engineering {
  double E;
  double nu;
};

Engineering lame_to_engineering(double mu, double lambda);
double bending_stiffness(double E, double nu, double t);

struct ScaleCoefficients {
  double a0, a1, a2, b0, b1;
};

ScaleCoefficients scale_coefficients(const MaterialParams& params, Point x);

struct DerivedCoefficients {
  double E, nu, B_stiff;
  ScaleCoefficients scale;
};

DerivedCoefficients derived_coefficients(const MaterialParams& params, Point x);

struct QSplit {
  double q8;
  double q9;
};

/// Default split of the constrained pair: q8 = 3 b1 / 2, q9 = b1 / 2.
QSplit default_q_split(double b1);

struct TensorTriple {
  Tensor4 P;
  Tensor4 Ph;
  Tensor6 Q;
  double q8 = 0.0;
  double q9 = 0.0;
};

TensorTriple build_tensors(const MaterialParams& params, Point x, std::optional<QSplit> q_split = std::nullopt);

/// Builds the tensors from already-evaluated Lamé values; used by assembly and tests.
TensorTriple build_tensors(const MaterialParams& params, double mu, double lambda,
                           std::optional<QSplit> q_split = std::nullopt);

struct ConvexityConstants {
  double xi_P;
  double xi_Q;
  double min_P;  // unnormalized minimum Rayleigh quotient of P + Ph
  double min_Q;  // unnormalized minimum Rayleigh quotient of Q
};

ConvexityConstants verify_convexity(const TensorTriple& T, const MaterialParams& params);

/// Quadratic forms of P + Ph and Q restricted to symmetric arguments written in
/// derivative components: curvature acts on (w_xx, w_xy, w_yy), gradient on
/// (w_xxx, w_xxy, w_xyy, w_yyy). B(w, v) density = h_v^T curvature h_w + g_v^T gradient g_w.
struct ConstitutiveBlocks {
  Eigen::Matrix3d curvature;
  Eigen::Matrix4d gradient;
};

ConstitutiveBlocks constitutive_blocks(const TensorTriple& T);

/// Symmetric tensor built from second derivatives (w_xx, w_xy, w_yy).
Tensor2 hessian_tensor(double wxx, double wxy, double wyy);
/// Fully symmetric tensor built from third derivatives.
Tensor3 third_gradient_tensor(double wxxx, double wxxy, double wxyy, double wyyy);

}  // namespace nanoplate
