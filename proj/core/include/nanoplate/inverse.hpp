#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nanoplate/discretization.hpp"
#include "nanoplate/solver.hpp"

namespace nanoplate {

/// Pointwise deflection samples with the description of the noise they carry.
struct Measurement {
  std::vector<Point> points;
  std::vector<double> values;
  double epsilon = 0.0;    // normalized noise level
  double noise_std = 0.0;  // per-sample standard deviation eps rho0 f_bar
  std::uint64_t seed = 0;
  double sigma = 0.0;  // interior margin the data is meant for

  [[nodiscard]] std::size_t size() const { return points.size(); }
};

/// Uniform (n x n) node grid over the closed plate, boundary included.
std::vector<Point> sample_grid(const PlateDomain& domain, int n);

Measurement sample_field(const ScalarField& w, std::vector<Point> points);

/// Adds i.i.d. Gaussian noise of standard deviation eps rho0 f_bar to every sample.
void add_noise(Measurement& m, double epsilon, double rho0, double f_bar, std::uint64_t seed);

struct ProjectionOptions {
  /// Smoothing weight on int |grad^3 u|^2 relative to the trace ratio of the
  /// two normal matrices. Negative selects it by the discrepancy principle
  /// (fit residual matched to the noise level); 0 disables smoothing.
  double smoothing = -1.0;
};

struct ProjectionReport {
  double smoothing = 0.0;
  double rms_residual = 0.0;
};

/// Least-squares spline fit of the samples, optionally penalizing grad^3.
Deflection project_measurement(const Measurement& m, SpacePtr space, const ProjectionOptions& options = {},
                               ProjectionReport* report = nullptr);

struct ReconstructionOptions {
  double sigma = 0.125;        // test functions are supported in the interior region of margin sigma rho0
  bool include_P0 = false;     // keep f v(P0) instead of excluding test functions near the load
  double exclusion_radius = 0.0;  // radius of the disc around P0 the test supports must avoid
  double kbar = 10.0;          // clip bound kbar / rho0
  double mask_threshold = 1e-2;   // |w| below this fraction of max |w| counts as masked
  int threads = 1;
};

/// Linear system A kappa = r from the weak form tested against interior
/// state functions: A_jk = int phi_k w v_j, r_j = f v_j(P0) - K(w, v_j).
struct ReconstructionSystem {
  SpacePtr coef_space;
  std::vector<int> tests;  // state-space DOFs used as test functions
  Eigen::MatrixXd A;
  Eigen::VectorXd r;
  double mask_fraction = 0.0;
  double sigma = 0.0;
  double rho0 = 1.0;
  double kbar = 10.0;
};

ReconstructionSystem build_reconstruction_system(const SplineFunction& w_meas, const LoadCase& load,
                                                 const MaterialParams& material, SpacePtr coef_space,
                                                 const ReconstructionOptions& options = {});

struct ReconstructionResult {
  std::shared_ptr<const SplineFunction> kappa;  // clipped to [0, kbar / rho0]
  Eigen::VectorXd unclipped;
  double alpha = 0.0;
  double residual = 0.0;            // ||A kappa - r|| for the clipped coefficients
  double unclipped_residual = 0.0;  // same for the unclipped least-squares solution
  double sigma = 0.0;
  double mask_fraction = 0.0;
  int clipped = 0;
  int tests = 0;

  [[nodiscard]] nlohmann::json to_json() const;
};

/// Tikhonov solution of min ||A c - r||^2 + alpha' ||c||^2 with
/// alpha' = alpha tr(A^T A) / n, then clipped.
ReconstructionResult solve_reconstruction(const ReconstructionSystem& sys, double alpha);

ReconstructionResult reconstruct_kappa(const SplineFunction& w_meas, const LoadCase& load,
                                       const MaterialParams& material, SpacePtr coef_space, double alpha,
                                       const ReconstructionOptions& options = {});

/// Residual of the weak form recomputed from assembled K and M(kappa) on the
/// test rows; equals ReconstructionResult::residual up to rounding.
double weak_form_residual(const SplineFunction& w_meas, const LoadCase& load, const MaterialParams& material,
                          const ScalarField& kappa, const std::vector<int>& tests);

struct AlphaChoice {
  double alpha = 0.0;
  std::size_t index = 0;
  std::vector<double> residuals;
  bool monotone = true;
};

/// Discrepancy principle: the alpha whose residual is closest to the noise
/// level from above; the smallest alpha when every residual lies above it,
/// the largest when every residual lies below.
AlphaChoice choose_alpha(const ReconstructionSystem& sys, std::vector<double> alphas, double noise_level);

/// Coarse degree-2 space for the foundation modulus, `coarsening` times
/// coarser than the state space.
SpacePtr coefficient_space_for(const SplineSpace& state, int coarsening = 4);

/// L2 projection of a field onto a coefficient space.
std::shared_ptr<const SplineFunction> project_coefficient(const ScalarField& kappa, SpacePtr coef_space);

void write_measurement_csv(const Measurement& m, const std::string& path);
Measurement read_measurement_csv(const std::string& path);
/// kappa sampled on an (n x n) node grid: x, y, kappa.
void write_field_grid_csv(const ScalarField& f, const PlateDomain& domain, int n, const std::string& path);

}  // namespace nanoplate
