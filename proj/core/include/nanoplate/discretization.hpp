#pragma once

#include <algorithm>
#include <memory>
#include <optional>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "nanoplate/bspline.hpp"
#include "nanoplate/field.hpp"
#include "nanoplate/geometry.hpp"
#include "nanoplate/material.hpp"

namespace nanoplate {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Rectangular plate [0, Lx] x [0, Ly] with reference length rho0.
struct PlateDomain {
  double Lx = 1.0;
  double Ly = 1.0;
  double rho0 = 1.0;
  double M1 = 0.0;  // area bound |Omega| <= M1 rho0^2; 0 disables the check

  [[nodiscard]] double area() const { return Lx * Ly; }
  [[nodiscard]] Rect rect() const { return {0.0, 0.0, Lx, Ly}; }
  [[nodiscard]] double aspect_ratio() const { return Lx / Ly; }
  void validate() const;
};

/// Nonzero tensor-product basis functions at one point: the (p+1)^2 functions
/// N_{span_x + a}(x) N_{span_y + b}(y), a, b = 0..p, with x/y derivatives up
/// to `order`.
struct LocalBasis {
  int degree = 0;
  int order = 0;
  int span_x = 0;
  int span_y = 0;
  std::vector<double> dx;  // [(order+1) x (p+1)]
  std::vector<double> dy;

  [[nodiscard]] double partial(int a, int b, int nx, int ny) const {
    return dx[nx * (degree + 1) + a] * dy[ny * (degree + 1) + b];
  }
};

/// Tensor-product spline space on a PlateDomain. `clamp_layers` boundary
/// functions are removed on every side; 3 layers enforce w = w,n = w,nn = 0.
class SplineSpace {
 public:
  SplineSpace(PlateDomain domain, int degree, int spans_x, int spans_y, int clamp_layers, int quad_order);

  [[nodiscard]] const PlateDomain& domain() const { return domain_; }
  [[nodiscard]] int degree() const { return bx_.degree(); }
  [[nodiscard]] int spans_x() const { return bx_.spans(); }
  [[nodiscard]] int spans_y() const { return by_.spans(); }
  [[nodiscard]] int clamp_layers() const { return clamp_; }
  [[nodiscard]] int quad_order() const { return quad_order_; }
  [[nodiscard]] const BSplineBasis& basis_x() const { return bx_; }
  [[nodiscard]] const BSplineBasis& basis_y() const { return by_; }

  [[nodiscard]] int active_x() const { return bx_.size() - 2 * clamp_; }
  [[nodiscard]] int active_y() const { return by_.size() - 2 * clamp_; }
  [[nodiscard]] int num_active() const { return active_x() * active_y(); }

  /// Active DOF index of global function (ix, iy), or -1 if removed.
  [[nodiscard]] int dof(int ix, int iy) const;
  /// Global function indices of an active DOF.
  [[nodiscard]] std::pair<int, int> function_of(int dof) const;
  /// Support rectangle of an active DOF.
  [[nodiscard]] Rect support(int dof) const;

  [[nodiscard]] LocalBasis local_basis(Point p, int order) const;
  [[nodiscard]] bool contains(Point p) const { return domain_.rect().contains(p, 1e-12 * std::max(domain_.Lx, domain_.Ly)); }

 private:
  PlateDomain domain_;
  BSplineBasis bx_;
  BSplineBasis by_;
  int clamp_;
  int quad_order_;
};

using SpacePtr = std::shared_ptr<const SplineSpace>;

/// Clamped state space: degree p >= 5, at least 4 spans per direction, Gauss
/// order p + 1 per span unless overridden.
SpacePtr build_space(const PlateDomain& domain, int degree, int spans_x, int spans_y, int quad_order = 0);

/// Unconstrained space used for coefficient fields such as the foundation modulus.
SpacePtr build_coefficient_space(const PlateDomain& domain, int degree, int spans_x, int spans_y);

/// A function in a SplineSpace given by its active coefficients.
class SplineFunction : public ScalarField {
 public:
  SplineFunction(SpacePtr space, Eigen::VectorXd coefficients);

  [[nodiscard]] const SplineSpace& space() const { return *space_; }
  [[nodiscard]] const SpacePtr& space_ptr() const { return space_; }
  [[nodiscard]] const Eigen::VectorXd& coefficients() const { return coeffs_; }

  [[nodiscard]] double value(Point p) const override;
  [[nodiscard]] Partials partials(Point p, int order) const override;
  [[nodiscard]] int max_order() const override { return space_->degree(); }

 private:
  SpacePtr space_;
  Eigen::VectorXd coeffs_;
};

struct AssemblyOptions {
  /// Fraction theta of the constrained pair: q8 = theta * 5 b1 / 2, q9 = (1 - theta) * 5 b1 / 4.
  /// Unset uses the default split.
  std::optional<double> q8_fraction;
  int threads = 1;
};

/// K_ij = int (P + Ph) grad^2 phi_j . grad^2 phi_i + Q grad^3 phi_j . grad^3 phi_i.
SparseMatrix assemble_stiffness(const SplineSpace& space, const MaterialParams& material,
                                const AssemblyOptions& options = {});

/// M_ij = int kappa phi_i phi_j. kappa must be nonnegative at every quadrature point.
SparseMatrix assemble_kappa_mass(const SplineSpace& space, const ScalarField& kappa, int quad_order = 0,
                                 int threads = 1);

/// F_i = f phi_i(P0); requires dist(P0, boundary) >= d rho0.
Eigen::VectorXd point_load_vector(const SplineSpace& space, Point P0, double f, double d);

/// F_i = int g phi_i for a distributed load.
Eigen::VectorXd load_vector(const SplineSpace& space, const ScalarField& g);

/// Exact embedding of a function from `coarse` into `fine`; the fine knot
/// vectors must contain the coarse ones and both spaces share the degree.
Eigen::VectorXd prolongate(const SplineSpace& coarse, const SplineSpace& fine, const Eigen::VectorXd& coarse_coeffs);

/// Integrates fn(point, weight) over every Gauss point of the space's span grid.
template <class Fn>
void for_each_quadrature_point(const SplineSpace& space, int quad_order, Fn&& fn);

}  // namespace nanoplate

#include "nanoplate/quadrature.hpp"

namespace nanoplate {

template <class Fn>
void for_each_quadrature_point(const SplineSpace& space, int quad_order, Fn&& fn) {
  const int q = quad_order > 0 ? quad_order : space.quad_order();
  const auto& bx = space.basis_x();
  const auto& by = space.basis_y();
  for (int sy = 0; sy < by.spans(); ++sy) {
    const GaussRule gy = gauss_legendre(q, by.breakpoint(sy), by.breakpoint(sy + 1));
    for (int sx = 0; sx < bx.spans(); ++sx) {
      const GaussRule gx = gauss_legendre(q, bx.breakpoint(sx), bx.breakpoint(sx + 1));
      for (int j = 0; j < q; ++j)
        for (int i = 0; i < q; ++i) fn(Point{gx.nodes[i], gy.nodes[j]}, gx.weights[i] * gy.weights[j]);
    }
  }
}

}  // namespace nanoplate
