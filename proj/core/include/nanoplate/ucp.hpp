#pragma once

#include <limits>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nanoplate/norms.hpp"

namespace nanoplate {

struct UCProbeConfig {
  double rho0 = 1.0;
  double tau = 0.05;           // probe disc radius tau rho0
  double margin_factor = 4.0;  // centers keep margin_factor tau rho0 from the boundary of U
  int grid = 9;                // center lattice is grid x grid over the bounding box of U
  double p = 2.0;              // candidate A_p exponent
  std::vector<double> etas{1e-8, 1e-6, 1e-4};  // floors |w| >= eta max |w|
  int disc_cells = 4;          // radial cells per probe disc
  int disc_order = 4;
  NormConfig norms;
  int threads = 1;

  void validate() const;
};

/// Lattice centers whose probe disc keeps the configured margin inside U.
std::vector<Point> probe_centers(const Region& U, const UCProbeConfig& cfg);

struct Propagation {
  double constant = 0.0;  // min over centers of int_{B} w^2 / int_U w^2
  Point argmin;
  std::vector<double> ratios;  // per center
};

Propagation propagation_constant(const ScalarField& w, const Region& U, const UCProbeConfig& cfg);
/// Same with explicit centers.
Propagation propagation_constant(const ScalarField& w, const Region& U, const std::vector<Point>& centers,
                                 const UCProbeConfig& cfg);

struct ApConstant {
  double eta = 0.0;
  double value = 0.0;  // max over centers; +inf when the regularized integral diverges
  Point argmax;
  bool finite = true;
  std::vector<double> products;  // per center
};

/// (mean_B w^2) (mean_B |w|^(-2/(p-1)))^(p-1) maximized over probe centers,
/// with |w| floored at eta max_U |w|.
ApConstant ap_constant(const ScalarField& w, const Region& U, const std::vector<Point>& centers,
                       const UCProbeConfig& cfg, double p, double eta);

struct UCReport {
  std::vector<Point> centers;
  double tau = 0.0;
  double p = 0.0;
  Propagation propagation;
  std::vector<ApConstant> ap;  // one per eta
  double frequency_ratio = std::numeric_limits<double>::quiet_NaN();

  [[nodiscard]] double ap_value() const { return ap.empty() ? 0.0 : ap.front().value; }
  [[nodiscard]] nlohmann::json to_json() const;
  /// center_x, center_y, tau, energy_ratio, ap_product, eta; one row per center and eta.
  [[nodiscard]] std::string to_csv() const;
};

/// Both surrogates plus the frequency ratio of w on U.
UCReport run_uc_checks(const ScalarField& w, const Region& U, const UCProbeConfig& cfg);

}  // namespace nanoplate
