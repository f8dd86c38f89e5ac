#pragma once

#include <span>
#include <string>
#include <vector>

#include "nanoplate/discretization.hpp"

namespace nanoplate {

/// Concentrated transverse force f = rho0^2 f_bar at P0.
struct LoadCase {
  Point P0{0.5, 0.5};
  double f_bar = 1.0;
  double d = 0.2;  // required separation dist(P0, boundary) >= d rho0

  [[nodiscard]] double f(double rho0) const { return rho0 * rho0 * f_bar; }
  void validate(const PlateDomain& domain) const;
};

struct DeflectionMeta {
  std::string kappa;
  std::string material_hash;
  double f = 0.0;
  Point P0;
};

/// Solution of the direct problem as a spline in the clamped state space.
class Deflection final : public SplineFunction {
 public:
  Deflection(SpacePtr space, Eigen::VectorXd coefficients, DeflectionMeta meta = {});

  [[nodiscard]] const DeflectionMeta& meta() const { return meta_; }
  [[nodiscard]] std::string describe() const override { return "deflection"; }

 private:
  DeflectionMeta meta_;
};

enum class LinearSolver { Direct, ConjugateGradient };

struct SolveOptions {
  LinearSolver method = LinearSolver::Direct;
  double cg_tolerance = 1e-12;
  int cg_max_iterations = 0;  // 0 lets the solver pick 10 n
  double residual_target = 1e-10;
};

struct SolveReport {
  double relative_residual = 0.0;
  int iterations = 0;
};

/// Solves (K + M) w = F.
Eigen::VectorXd solve_system(const SparseMatrix& K, const SparseMatrix& M, const Eigen::VectorXd& F,
                             const SolveOptions& options = {}, SolveReport* report = nullptr);

Deflection solve_direct(SpacePtr space, const SparseMatrix& K, const SparseMatrix& M, const Eigen::VectorXd& F,
                        DeflectionMeta meta = {}, const SolveOptions& options = {}, SolveReport* report = nullptr);

/// Assembles and solves the point-load problem for the given foundation modulus.
Deflection solve_plate(SpacePtr space, const MaterialParams& material, const ScalarField& kappa,
                       const LoadCase& load, const SolveOptions& options = {}, int threads = 1);

/// Exact spline derivatives up to third order at each point.
std::vector<Partials> evaluate(const SplineFunction& w, std::span<const Point> points, int order);

struct AnnulusCheck {
  double sigma;   // inner radius
  double energy;  // integral of w^2 over B_{2 sigma} \ B_sigma
};

struct LoadNeighborhood {
  double w_P0 = 0.0;
  double sigma_bar_emp = 0.0;
  double min_on_disc = 0.0;
  std::vector<AnnulusCheck> annuli;
  bool ok = false;
};

/// Largest radius r <= d rho0 / 2 on which w stays above w(P0)/2, with the
/// annulus energies for radii below half of it.
LoadNeighborhood check_load_neighborhood(const SplineFunction& w, const LoadCase& load);

std::string material_hash(const MaterialParams& material);

}  // namespace nanoplate
