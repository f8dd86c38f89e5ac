#include "nanoplate/material.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nanoplate/error.hpp"

namespace nanoplate {

namespace {
constexpr double delta(int i, int j) { return i == j ? 1.0 : 0.0; }
}  // namespace

Tensor2 apply_rank4(const Tensor4& T, const Tensor2& A) {
  Tensor2 out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      double s = 0.0;
      for (int l = 0; l < 2; ++l)
        for (int m = 0; m < 2; ++m) s += T(i, j, l, m) * A(l, m);
      out(i, j) = s;
    }
  return out;
}

Tensor3 apply_rank6(const Tensor6& T, const Tensor3& B) {
  Tensor3 out;
  for (int ijk = 0; ijk < 8; ++ijk) {
    double s = 0.0;
    for (int lmn = 0; lmn < 8; ++lmn) s += T.v[8 * ijk + lmn] * B.v[lmn];
    out.v[ijk] = s;
  }
  return out;
}

double inner(const Tensor2& A, const Tensor2& B) {
  double s = 0.0;
  for (int k = 0; k < 4; ++k) s += A.v[k] * B.v[k];
  return s;
}

double inner(const Tensor3& A, const Tensor3& B) {
  double s = 0.0;
  for (int k = 0; k < 8; ++k) s += A.v[k] * B.v[k];
  return s;
}

Tensor4 operator+(const Tensor4& a, const Tensor4& b) {
  Tensor4 out;
  for (int k = 0; k < 16; ++k) out.v[k] = a.v[k] + b.v[k];
  return out;
}

double MaterialParams::l() const { return std::min({l0, l1, l2}); }

void MaterialParams::validate() const {
  NANOPLATE_THROW_IF(!(rho0 > 0.0), ErrorCode::InvalidMaterial, "rho0 must be positive");
  NANOPLATE_THROW_IF(!(t > 0.0), ErrorCode::InvalidMaterial, "thickness t must be positive");
  NANOPLATE_THROW_IF(!(l0 > 0.0 && l1 > 0.0 && l2 > 0.0), ErrorCode::InvalidMaterial,
                     "length scales l0, l1, l2 must be positive");
  NANOPLATE_THROW_IF(!(alpha0 > 0.0 && gamma0 > 0.0), ErrorCode::InvalidMaterial,
                     "ellipticity floors alpha0, gamma0 must be positive");
  NANOPLATE_THROW_IF(!mu || !lambda, ErrorCode::InvalidMaterial, "Lame fields mu and lambda are required");
}

void MaterialParams::check_point(Point x) const {
  const double m = mu->value(x);
  const double la = lambda->value(x);
  if (!(m >= alpha0) || !(2.0 * m + 3.0 * la >= gamma0)) {
    std::ostringstream os;
    os << "ellipticity violated at (" << x.x << ", " << x.y << "): mu=" << m << ", lambda=" << la;
    throw Error(ErrorCode::InvalidMaterial, os.str());
  }
}

bool MaterialParams::is_homogeneous() const { return mu->is_constant() && lambda->is_constant(); }

Engineering lame_to_engineering(double mu, double lambda) {
  NANOPLATE_THROW_IF(!(mu > 0.0), ErrorCode::InvalidMaterial, "shear modulus mu must be positive");
  NANOPLATE_THROW_IF(!(mu + lambda > 0.0), ErrorCode::InvalidMaterial, "mu + lambda must be positive");
  return {mu * (2.0 * mu + 3.0 * lambda) / (mu + lambda), lambda / (2.0 * (mu + lambda))};
}

double bending_stiffness(double E, double nu, double t) {
  NANOPLATE_THROW_IF(nu * nu == 1.0, ErrorCode::SingularMaterial, "Poisson ratio with nu^2 = 1");
  NANOPLATE_THROW_IF(!(std::fabs(nu) < 1.0), ErrorCode::InvalidMaterial, "Poisson ratio must satisfy |nu| < 1");
  return t * t * t * E / (12.0 * (1.0 - nu * nu));
}

ScaleCoefficients scale_coefficients(const MaterialParams& params, Point x) {
  const double m = params.mu->value(x);
  const double t = params.t;
  const double t3 = t * t * t / 12.0;
  return {2.0 * m * t * params.l0 * params.l0, 2.0 / 15.0 * m * t * params.l1 * params.l1,
          m * t * params.l2 * params.l2, 2.0 * m * t3 * params.l0 * params.l0,
          0.4 * m * t3 * params.l1 * params.l1};
}

DerivedCoefficients derived_coefficients(const MaterialParams& params, Point x) {
  const auto [E, nu] = lame_to_engineering(params.mu->value(x), params.lambda->value(x));
  return {E, nu, bending_stiffness(E, nu, params.t), scale_coefficients(params, x)};
}

QSplit default_q_split(double b1) { return {1.5 * b1, 0.5 * b1}; }

TensorTriple build_tensors(const MaterialParams& params, Point x, std::optional<QSplit> q_split) {
  return build_tensors(params, params.mu->value(x), params.lambda->value(x), q_split);
}

TensorTriple build_tensors(const MaterialParams& params, double mu, double lambda, std::optional<QSplit> q_split) {
  const auto [E, nu] = lame_to_engineering(mu, lambda);
  const double B = bending_stiffness(E, nu, params.t);
  const double t = params.t;
  const double t3 = t * t * t / 12.0;
  const double a0 = 2.0 * mu * t * params.l0 * params.l0;
  const double a1 = 2.0 / 15.0 * mu * t * params.l1 * params.l1;
  const double a2 = mu * t * params.l2 * params.l2;
  const double b0 = 2.0 * mu * t3 * params.l0 * params.l0;
  const double b1 = 0.4 * mu * t3 * params.l1 * params.l1;

  TensorTriple T;
  if (q_split) {
    const double target = 5.0 * b1;
    const double got = 2.0 * (q_split->q8 + 2.0 * q_split->q9);
    NANOPLATE_THROW_IF(std::fabs(got - target) > 1e-12 * std::fabs(target), ErrorCode::InvalidTensorSplit,
                       "q-split must satisfy 2(q8 + 2 q9) = 5 b1");
    T.q8 = q_split->q8;
    T.q9 = q_split->q9;
  } else {
    const QSplit def = default_q_split(b1);
    T.q8 = def.q8;
    T.q9 = def.q9;
  }

  // The fourth-order identity is taken in its minor-symmetric form; on
  // symmetric arguments it coincides with delta_il delta_jm.
  const double c_id_P = B * (1.0 - nu);
  const double c_tr_P = B * nu;
  const double c_id_Ph = 2.0 * a2 + 5.0 * a1;
  const double c_tr_Ph = -a1 - a2 + a0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int l = 0; l < 2; ++l)
        for (int m = 0; m < 2; ++m) {
          const double sym_id = 0.5 * (delta(i, l) * delta(j, m) + delta(i, m) * delta(j, l));
          const double tr = delta(i, j) * delta(l, m);
          T.P(i, j, l, m) = c_id_P * sym_id + c_tr_P * tr;
          T.Ph(i, j, l, m) = c_id_Ph * sym_id + c_tr_Ph * tr;
        }

  const double c3 = (b0 - 3.0 * b1) / 3.0;
  const double c6 = (b0 - 3.0 * b1) / 6.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l)
          for (int m = 0; m < 2; ++m)
            for (int n = 0; n < 2; ++n) {
              double q = c3 * delta(i, j) * delta(k, n) * delta(l, m);
              q += c6 * (delta(i, k) * (delta(j, l) * delta(m, n) + delta(j, m) * delta(l, n)) +
                         delta(j, k) * (delta(i, l) * delta(m, n) + delta(i, m) * delta(l, n)));
              q += T.q8 * delta(k, n) * (delta(i, l) * delta(j, m) + delta(i, m) * delta(j, l));
              q += T.q9 * (delta(j, n) * (delta(i, l) * delta(k, m) + delta(i, m) * delta(k, l)) +
                           delta(i, n) * (delta(j, l) * delta(k, m) + delta(j, m) * delta(k, l)));
              T.Q(i, j, k, l, m, n) = q;
            }
  return T;
}

namespace {

std::array<Tensor2, 3> symmetric_rank2_basis_orthonormal() {
  const double r = 1.0 / std::sqrt(2.0);
  std::array<Tensor2, 3> e{};
  e[0](0, 0) = 1.0;
  e[1](0, 1) = r;
  e[1](1, 0) = r;
  e[2](1, 1) = 1.0;
  return e;
}

std::array<Tensor3, 4> symmetric_rank3_basis_orthonormal() {
  std::array<Tensor3, 4> e{};
  const double r = 1.0 / std::sqrt(3.0);
  e[0](0, 0, 0) = 1.0;
  e[1](0, 0, 1) = e[1](0, 1, 0) = e[1](1, 0, 0) = r;
  e[2](0, 1, 1) = e[2](1, 0, 1) = e[2](1, 1, 0) = r;
  e[3](1, 1, 1) = 1.0;
  return e;
}

}  // namespace

ConvexityConstants verify_convexity(const TensorTriple& T, const MaterialParams& params) {
  const Tensor4 PP = T.P + T.Ph;
  const auto e2 = symmetric_rank2_basis_orthonormal();
  Eigen::Matrix3d m2;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) m2(a, b) = inner(apply_rank4(PP, e2[b]), e2[a]);
  m2 = 0.5 * (m2 + m2.transpose()).eval();

  const auto e3 = symmetric_rank3_basis_orthonormal();
  Eigen::Matrix4d m3;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) m3(a, b) = inner(apply_rank6(T.Q, e3[b]), e3[a]);
  m3 = 0.5 * (m3 + m3.transpose()).eval();

  const double min_P = Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(m2, Eigen::EigenvaluesOnly).eigenvalues()(0);
  const double min_Q = Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d>(m3, Eigen::EigenvaluesOnly).eigenvalues()(0);
  const double l = params.l();
  const double t = params.t;
  ConvexityConstants out{min_P / (t * (t * t + l * l)), min_Q / (t * t * t * l * l), min_P, min_Q};
  NANOPLATE_THROW_IF(!(out.xi_P > 0.0), ErrorCode::MaterialNotConvex, "P + Ph is not positive definite");
  NANOPLATE_THROW_IF(!(out.xi_Q > 0.0), ErrorCode::MaterialNotConvex, "Q is not positive definite");
  return out;
}

Tensor2 hessian_tensor(double wxx, double wxy, double wyy) {
  Tensor2 A;
  A(0, 0) = wxx;
  A(0, 1) = A(1, 0) = wxy;
  A(1, 1) = wyy;
  return A;
}

Tensor3 third_gradient_tensor(double wxxx, double wxxy, double wxyy, double wyyy) {
  Tensor3 B;
  B(0, 0, 0) = wxxx;
  B(0, 0, 1) = B(0, 1, 0) = B(1, 0, 0) = wxxy;
  B(0, 1, 1) = B(1, 0, 1) = B(1, 1, 0) = wxyy;
  B(1, 1, 1) = wyyy;
  return B;
}

ConstitutiveBlocks constitutive_blocks(const TensorTriple& T) {
  const Tensor4 PP = T.P + T.Ph;
  const std::array<Tensor2, 3> e2 = {hessian_tensor(1, 0, 0), hessian_tensor(0, 1, 0), hessian_tensor(0, 0, 1)};
  const std::array<Tensor3, 4> e3 = {third_gradient_tensor(1, 0, 0, 0), third_gradient_tensor(0, 1, 0, 0),
                                     third_gradient_tensor(0, 0, 1, 0), third_gradient_tensor(0, 0, 0, 1)};
  ConstitutiveBlocks out;
  for (int b = 0; b < 3; ++b) {
    const Tensor2 Pe = apply_rank4(PP, e2[b]);
    for (int a = 0; a < 3; ++a) out.curvature(a, b) = inner(Pe, e2[a]);
  }
  for (int b = 0; b < 4; ++b) {
    const Tensor3 Qe = apply_rank6(T.Q, e3[b]);
    for (int a = 0; a < 4; ++a) out.gradient(a, b) = inner(Qe, e3[a]);
  }
  out.curvature = 0.5 * (out.curvature + out.curvature.transpose()).eval();
  out.gradient = 0.5 * (out.gradient + out.gradient.transpose()).eval();
  return out;
}

}  // namespace nanoplate
