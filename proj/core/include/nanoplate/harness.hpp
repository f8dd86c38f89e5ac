#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nanoplate/inverse.hpp"
#include "nanoplate/norms.hpp"
#include "nanoplate/solver.hpp"
#include "nanoplate/ucp.hpp"

namespace nanoplate {

/// Generator of foundation moduli.
struct KappaFamily {
  enum class Kind { Constant, Bump, BandLimited, Expression };

  Kind kind = Kind::Bump;
  double base = 2.0;
  double amplitude = 1.0;
  Point center{0.5, 0.5};
  double width = 0.2;      // Gaussian bump standard deviation
  int modes = 3;           // band limit of the random cosine series
  std::uint64_t seed = 1;  // band-limited draws
  std::string expression;  // Kind::Expression
  int max_draws = 50;      // admissibility rejection sampling

  [[nodiscard]] FieldPtr make(const PlateDomain& domain, std::uint64_t draw = 0) const;
  [[nodiscard]] nlohmann::json to_json() const;
};

KappaFamily::Kind kappa_family_kind(const std::string& name);
std::string to_string(KappaFamily::Kind kind);

struct ExperimentConfig {
  PlateDomain domain;
  MaterialParams material;
  LoadCase load;
  int degree = 5;
  int spans = 32;
  int coef_coarsening = 4;
  SolveOptions solve;

  double sigma = 0.125;  // interior margin sigma rho0, aligned with the knots so test supports tile the interior
  double s = 0.5;
  double kbar = 10.0;
  KappaFamily kappa;

  std::vector<double> epsilons{1e-6, 1e-5, 1e-4, 1e-3};
  std::vector<std::uint64_t> seeds{1, 2, 3};
  std::vector<double> alphas{1e-12, 1e-11, 1e-10, 1e-9, 1e-8, 1e-7, 1e-6, 1e-5, 1e-4, 1e-3, 1e-2};
  std::vector<double> shifts{1e-3, 3e-3, 1e-2, 3e-2, 1e-1};  // constant-shift family for the key estimate
  int sample_grid = 61;
  bool include_P0 = false;
  double mask_threshold = 1e-2;

  UCProbeConfig ucp;
  bool run_ucp = true;
  NormConfig norms;

  std::string output_dir = "out";
  int threads = 1;

  void validate() const;
  [[nodiscard]] nlohmann::json to_json() const;
};

/// ExperimentConfig defaults with the material constants filled in.
ExperimentConfig default_experiment();

/// Result of one forward pair.
struct PairRecord {
  double epsilon = 0.0;         // ||w1 - w2||_L2 / (rho0 f_bar)
  double weighted_misfit = 0.0; // int_{interior} (k2 - k1)^2 w1^2
  double kappa_gap = 0.0;       // ||k1 - k2||_L2(interior)
  double misfit_bound = 0.0;    // (kbar/rho0)^2 int_interior w1^2
  double sigma = 0.0;

  [[nodiscard]] nlohmann::json to_json() const;
};

/// Shared state of an experiment: spaces, assembled stiffness and the solve of kappa1.
class Experiment {
 public:
  explicit Experiment(ExperimentConfig cfg);

  [[nodiscard]] const ExperimentConfig& config() const { return cfg_; }
  [[nodiscard]] const SpacePtr& space() const { return space_; }
  [[nodiscard]] const SpacePtr& coef_space() const { return coef_space_; }
  [[nodiscard]] const SparseMatrix& stiffness() const { return K_; }
  [[nodiscard]] Region interior() const;

  /// Validates admissibility, assembles the mass and solves.
  [[nodiscard]] Deflection solve(const ScalarField& kappa) const;
  [[nodiscard]] Admissibility admissibility(const ScalarField& kappa) const;

  PairRecord run_pair(const ScalarField& kappa1, const ScalarField& kappa2) const;

 private:
  ExperimentConfig cfg_;
  SpacePtr space_;
  SpacePtr coef_space_;
  SparseMatrix K_;
  Eigen::VectorXd F_;
};

/// One noisy reconstruction.
struct SweepRecord {
  double epsilon = 0.0;
  std::uint64_t seed = 0;
  double realized_gap = 0.0;  // ||w_meas - w1||_L2 / (rho0 f_bar), equals epsilon by construction
  double alpha = 0.0;
  double noise_level = 0.0;
  double error = 0.0;           // ||kappa_hat - kappa1||_L2(interior)
  double relative_error = 0.0;  // error / ||kappa1||_L2(interior)
  double residual = 0.0;
  double mask_fraction = 0.0;
  double sigma = 0.0;
  bool degenerate = false;
  std::string note;

  [[nodiscard]] nlohmann::json to_json() const;
};

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
};

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

struct KeyEstimate {
  double required_slope = 0.0;  // 2s/(6+s)
  double fitted_slope = 0.0;
  double log_C = 0.0;           // smallest C with log m <= req log eps + log C on every record
  double worst_slack = 0.0;     // min over records of (req log eps + log C - log m)
  bool pass = false;
  std::vector<PairRecord> records;

  [[nodiscard]] nlohmann::json to_json() const;
};

/// Checks log(weighted misfit) <= (2s/(6+s)) log eps + log C over a sweep;
/// pass requires a fitted slope of at least 2s/(6+s) - 0.1.
KeyEstimate verify_key_estimate(const std::vector<PairRecord>& records, double s);

struct StabilityReport {
  nlohmann::json config;
  std::vector<SweepRecord> records;
  SweepRecord floor;  // epsilon = 0
  std::vector<double> level_epsilon;
  std::vector<double> level_error;  // mean error per level
  LinearFit fit;
  bool slope_in_range = false;
  bool monotone = false;
  KeyEstimate key;
  std::optional<UCReport> uc;

  [[nodiscard]] nlohmann::json to_json() const;
};

/// Seed of the noise draw for one (seed, epsilon) case.
std::uint64_t case_seed(std::uint64_t seed, double epsilon);

/// Noisy measurement of w1 with the L2 gap rescaled to exactly eps rho0 f_bar.
Deflection perturbed_measurement(const Experiment& ex, const Deflection& w1, double epsilon, std::uint64_t seed,
                                 double* noise_level = nullptr);

SweepRecord reconstruct_case(const Experiment& ex, const ScalarField& kappa1, const Deflection& w1, double epsilon,
                             std::uint64_t seed);

StabilityReport stability_sweep(const ExperimentConfig& cfg);

/// Constant-shift pairs kappa2 = kappa1 + c for c in cfg.shifts.
std::vector<PairRecord> shift_family(const Experiment& ex, const ScalarField& kappa1);

/// Log-log plot of error against epsilon.
std::string sweep_plot_svg(const StabilityReport& report);

}  // namespace nanoplate
