#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nanoplate/discretization.hpp"
#include "nanoplate/field.hpp"
#include "nanoplate/geometry.hpp"

namespace nanoplate {

/// Integration region: a rectangle, a disc, an annulus or a rectangle with a
/// disc removed.
struct Region {
  enum class Kind { Rectangle, Disc, Annulus, RectMinusDisc };

  Kind kind = Kind::Rectangle;
  Rect rect;
  Point center;
  double r_inner = 0.0;  // hole radius (annulus, rect minus disc)
  double r_outer = 0.0;  // outer radius (disc, annulus)

  static Region rectangle(Rect r);
  static Region disc(Point c, double r);
  static Region annulus(Point c, double r_in, double r_out);
  static Region rect_minus_disc(Rect r, Point c, double radius);

  [[nodiscard]] bool empty() const;
  [[nodiscard]] bool contains(Point p) const;
  [[nodiscard]] double area() const;
  [[nodiscard]] Rect bounding_box() const;
  /// Distance from an interior point to the region boundary.
  [[nodiscard]] double boundary_distance(Point p) const;
  /// Distance from x along direction theta to the first boundary crossing,
  /// capped at rmax. x must lie in the region.
  [[nodiscard]] double reach(Point x, double theta, double rmax) const;
  [[nodiscard]] nlohmann::json to_json() const;
};

struct QuadPoint {
  Point p;
  double w;
};

/// Positive quadrature of a region with cells of side about h and `order`
/// Gauss points per cell direction. Cells cut by a hole are subdivided.
std::vector<QuadPoint> region_quadrature(const Region& region, double h, int order);

struct NormConfig {
  double rho0 = 1.0;
  int volume_cells = 40;  // cells across the shorter side of the bounding box
  int volume_order = 5;
  int pair_cells = 20;
  int pair_order = 3;
  double cutoff = 0.0;  // near-diagonal radius; 0 selects one pair-cell diameter
  int cutoff_angles = 64;
  int threads = 1;

  void validate() const;
  [[nodiscard]] double pair_cell_size(const Region& region) const;
  [[nodiscard]] double cutoff_for(const Region& region) const;
  [[nodiscard]] nlohmann::json to_json() const;
};

/// rho0^-1 (int_R u^2)^(1/2).
double l2_norm(const ScalarField& u, const Region& region, const NormConfig& cfg = {});

/// rho0^-1 (sum_{i<=k} rho0^(2i) int_R |grad^i u|^2)^(1/2).
double hk_norm(const ScalarField& u, int k, const Region& region, const NormConfig& cfg = {});

/// (int_R int_R |grad^k u(x) - grad^k u(y)|^2 / |x - y|^(2 + 2s))^(1/2).
/// Pairs closer than the cutoff are replaced by the first-order Taylor
/// surrogate integrated in closed form over the part of the cutoff ball
/// inside the region.
double fractional_seminorm(const ScalarField& u, double s, const Region& region, const NormConfig& cfg = {},
                           int k = 0);

/// ||u||_{H^{k+s}} = ||u||_{H^k} + rho0^(k+s-1) [grad^k u]_s.
double fractional_norm(const ScalarField& u, int k, double s, const Region& region, const NormConfig& cfg = {});

/// ||w||_{H^1/2(U)} / ||w||_{L2(U)}.
double frequency_ratio(const ScalarField& w, const Region& region, const NormConfig& cfg = {});

/// Points at distance greater than r from the boundary. The returned region
/// is empty when 2r >= min(Lx, Ly).
Region interior_region(const PlateDomain& domain, double r);

struct Admissibility {
  bool pass = false;
  bool nonnegative = false;
  double sup_norm = 0.0;
  double seminorm_term = 0.0;  // rho0^(s-1) [kappa]_s
  double bound = 0.0;          // kbar / rho0
};

/// Checks ||kappa||_inf + rho0^(s-1) [kappa]_s <= kbar / rho0 and kappa >= 0.
Admissibility kappa_admissibility(const ScalarField& kappa, double s, double kbar, const PlateDomain& domain,
                                  const NormConfig& cfg = {});

struct InterpolationDiagnostic {
  bool available = false;
  std::string reason;
  double log_h6 = 0.0;
  double log_h6s = 0.0;
  double log_l2 = 0.0;
  /// log C = log_h6 - (6/(6+s)) log_h6s - (s/(6+s)) log_l2.
  double log_C = 0.0;
};

/// Evaluates both sides of the interpolation inequality between L2 and
/// H^(6+s). Needs at least degree-7 splines for a finite [grad^6 w]_s.
InterpolationDiagnostic interpolation_diagnostic(const SplineFunction& w, double s, const Region& region,
                                                 const NormConfig& cfg = {});

/// {norm, region, value, quadrature_meta}.
nlohmann::json norm_record(const std::string& norm, const Region& region, double value, const NormConfig& cfg);

}  // namespace nanoplate
