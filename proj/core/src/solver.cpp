#include "nanoplate/solver.hpp"

#include <cmath>
#include <cstdint>
#include <iomanip>
#include <numbers>
#include <sstream>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>

#include "nanoplate/error.hpp"
#include "nanoplate/quadrature.hpp"

namespace nanoplate {

void LoadCase::validate(const PlateDomain& domain) const {
  NANOPLATE_THROW_IF(!(f_bar > 0.0), ErrorCode::InvalidConfig, "load intensity f_bar must be positive");
  NANOPLATE_THROW_IF(!(d > 0.0), ErrorCode::InvalidConfig, "separation constant d must be positive");
  NANOPLATE_THROW_IF(!domain.rect().contains(P0), ErrorCode::LoadPlacement, "load point outside the plate");
  NANOPLATE_THROW_IF(domain.rect().boundary_distance(P0) < d * domain.rho0, ErrorCode::LoadPlacement,
                     "load point closer than d rho0 to the boundary");
}

Deflection::Deflection(SpacePtr space, Eigen::VectorXd coefficients, DeflectionMeta meta)
    : SplineFunction(std::move(space), std::move(coefficients)), meta_(std::move(meta)) {
  NANOPLATE_THROW_IF(!this->coefficients().allFinite(), ErrorCode::NumericFailure, "deflection has non-finite coefficients");
}

Eigen::VectorXd solve_system(const SparseMatrix& K, const SparseMatrix& M, const Eigen::VectorXd& F,
                             const SolveOptions& options, SolveReport* report) {
  const SparseMatrix A = K + M;
  const double fnorm = F.norm();
  if (fnorm == 0.0) {
    if (report) *report = {0.0, 0};
    return Eigen::VectorXd::Zero(F.size());
  }
  Eigen::VectorXd w;
  int iterations = 0;
  if (options.method == LinearSolver::Direct) {
    Eigen::SimplicialLDLT<SparseMatrix> ldlt(A);
    NANOPLATE_THROW_IF(ldlt.info() != Eigen::Success, ErrorCode::AssemblyBug, "factorization of K + M failed");
    NANOPLATE_THROW_IF((ldlt.vectorD().array() <= 0.0).any(), ErrorCode::AssemblyBug,
                       "K + M is not positive definite");
    w = ldlt.solve(F);
    // Two steps of iterative refinement tighten the residual for the
    // badly scaled sixth-order systems.
    for (int it = 0; it < 2; ++it) {
      const Eigen::VectorXd r = F - A * w;
      if (r.norm() <= 1e-15 * fnorm) break;
      w += ldlt.solve(r);
      ++iterations;
    }
  } else {
    Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper, Eigen::DiagonalPreconditioner<double>> cg;
    cg.setTolerance(options.cg_tolerance);
    cg.setMaxIterations(options.cg_max_iterations > 0 ? options.cg_max_iterations : 10 * static_cast<int>(F.size()));
    cg.compute(A);
    w = cg.solve(F);
    iterations = static_cast<int>(cg.iterations());
  }
  const double rel = (A * w - F).norm() / fnorm;
  if (report) *report = {rel, iterations};
  if (!(rel <= options.residual_target) || !w.allFinite()) {
    std::ostringstream os;
    os << "linear solve did not reach the residual target: relative residual " << rel << " after " << iterations
       << " iterations";
    throw Error(ErrorCode::NumericFailure, os.str());
  }
  return w;
}

Deflection solve_direct(SpacePtr space, const SparseMatrix& K, const SparseMatrix& M, const Eigen::VectorXd& F,
                        DeflectionMeta meta, const SolveOptions& options, SolveReport* report) {
  Eigen::VectorXd w = solve_system(K, M, F, options, report);
  return Deflection(std::move(space), std::move(w), std::move(meta));
}

Deflection solve_plate(SpacePtr space, const MaterialParams& material, const ScalarField& kappa,
                       const LoadCase& load, const SolveOptions& options, int threads) {
  load.validate(space->domain());
  const double rho0 = space->domain().rho0;
  const SparseMatrix K = assemble_stiffness(*space, material, {std::nullopt, threads});
  const SparseMatrix M = assemble_kappa_mass(*space, kappa, 0, threads);
  const Eigen::VectorXd F = point_load_vector(*space, load.P0, load.f(rho0), load.d);
  DeflectionMeta meta{kappa.describe(), material_hash(material), load.f(rho0), load.P0};
  return solve_direct(std::move(space), K, M, F, std::move(meta), options);
}

std::vector<Partials> evaluate(const SplineFunction& w, std::span<const Point> points, int order) {
  NANOPLATE_THROW_IF(order < 0 || order > 3, ErrorCode::OrderTooHigh, "evaluation order must be 0..3");
  std::vector<Partials> out;
  out.reserve(points.size());
  for (const Point& p : points) out.push_back(w.partials(p, order));
  return out;
}

namespace {

double annulus_energy(const SplineFunction& w, Point c, double r0, double r1) {
  const GaussRule gr = gauss_legendre(12, r0, r1);
  const int nth = 96;
  double s = 0.0;
  for (std::size_t i = 0; i < gr.nodes.size(); ++i) {
    const double r = gr.nodes[i];
    for (int k = 0; k < nth; ++k) {
      const double th = 2.0 * std::numbers::pi * k / nth;
      const double v = w.value({c.x + r * std::cos(th), c.y + r * std::sin(th)});
      s += gr.weights[i] * r * (2.0 * std::numbers::pi / nth) * v * v;
    }
  }
  return s;
}

}  // namespace

LoadNeighborhood check_load_neighborhood(const SplineFunction& w, const LoadCase& load) {
  const double rho0 = w.space().domain().rho0;
  LoadNeighborhood out;
  out.w_P0 = w.value(load.P0);
  if (!(out.w_P0 > 0.0)) {
    out.ok = false;
    return out;
  }
  const double r_max = 0.5 * load.d * rho0;
  const int n_r = 128;
  const int n_th = 72;
  const double half = 0.5 * out.w_P0;
  double min_seen = out.w_P0;
  double sigma = 0.0;
  for (int i = 1; i <= n_r; ++i) {
    const double r = r_max * i / n_r;
    double ring_min = min_seen;
    for (int k = 0; k < n_th; ++k) {
      const double th = 2.0 * std::numbers::pi * k / n_th;
      ring_min = std::min(ring_min, w.value({load.P0.x + r * std::cos(th), load.P0.y + r * std::sin(th)}));
    }
    if (ring_min < half) break;
    min_seen = ring_min;
    sigma = r;
  }
  out.sigma_bar_emp = sigma;
  out.min_on_disc = min_seen;
  bool annuli_ok = sigma > 0.0;
  if (sigma > 0.0) {
    for (double frac : {0.5, 0.25, 0.125}) {
      const double s = frac * sigma;
      const double e = annulus_energy(w, load.P0, s, 2.0 * s);
      out.annuli.push_back({s, e});
      annuli_ok = annuli_ok && e > 0.0;
    }
  }
  out.ok = out.w_P0 > 0.0 && sigma > 0.0 && min_seen >= half && annuli_ok;
  return out;
}

std::string material_hash(const MaterialParams& material) {
  std::ostringstream os;
  os << std::setprecision(17) << material.rho0 << '|' << material.t << '|' << material.l0 << '|' << material.l1 << '|'
     << material.l2 << '|' << material.alpha0 << '|' << material.gamma0 << '|'
     << (material.mu ? material.mu->describe() : "") << '|' << (material.lambda ? material.lambda->describe() : "");
  const std::string text = os.str();
  std::uint64_t h = 1469598103934665603ULL;  // FNV-1a
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  std::ostringstream hex;
  hex << std::hex << std::setw(16) << std::setfill('0') << h;
  return hex.str();
}

}  // namespace nanoplate
