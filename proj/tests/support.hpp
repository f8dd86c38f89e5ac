#pragma once

#include <cmath>
#include <memory>
#include <numbers>
#include <random>

#include "nanoplate/discretization.hpp"
#include "nanoplate/field.hpp"
#include "nanoplate/material.hpp"
#include "nanoplate/norms.hpp"
#include "nanoplate/solver.hpp"
#include "nanoplate/ucp.hpp"

namespace nanoplate::testing {

inline MaterialParams material(double mu = 1.0, double lambda = 1.0) {
  MaterialParams m;
  m.mu = std::make_shared<ConstantField>(mu);
  m.lambda = std::make_shared<ConstantField>(lambda);
  return m;
}

inline double relative(double got, double want) { return std::fabs(got - want) / std::max(std::fabs(want), 1e-300); }

/// Constant-coefficient reduction of the plate operator on clamped functions:
/// B(w, w) = int D (lap w)^2 + G |grad lap w|^2.
struct PlateConstants {
  double D;
  double G;
};

inline PlateConstants plate_constants(const MaterialParams& m) {
  const double mu = m.mu->value({0, 0});
  const double la = m.lambda->value({0, 0});
  const double E = mu * (2 * mu + 3 * la) / (mu + la);
  const double nu = la / (2 * (mu + la));
  const double B = m.t * m.t * m.t * E / (12 * (1 - nu * nu));
  const double a0 = 2 * mu * m.t * m.l0 * m.l0;
  const double a1 = 2.0 / 15.0 * mu * m.t * m.l1 * m.l1;
  const double a2 = mu * m.t * m.l2 * m.l2;
  const double b0 = 2 * mu * m.t * m.t * m.t / 12 * m.l0 * m.l0;
  const double b1 = 0.4 * mu * m.t * m.t * m.t / 12 * m.l1 * m.l1;
  return {B + a0 + 4 * a1 + a2, b0 + 2 * b1};
}

/// Value-only field from a callable.
template <class F>
FieldPtr value_field(F f) {
  return std::make_shared<FunctionField>(
      [f](Point p, int) {
        Partials d(0);
        d(0, 0) = f(p);
        return d;
      },
      0);
}

/// k-th derivative of sin^3(pi x) = (3 sin(pi x) - sin(3 pi x)) / 4.
inline double sin3_derivative(double x, int k) {
  const double pi = 3.14159265358979323846;
  const double shift = k * pi / 2.0;
  return (3.0 * std::pow(pi, k) * std::sin(pi * x + shift) - std::pow(3.0 * pi, k) * std::sin(3.0 * pi * x + shift)) /
         4.0;
}

/// Manufactured clamped solution sin^3(pi x) sin^3(pi y) on the unit square.
inline double mms_solution(Point p) { return sin3_derivative(p.x, 0) * sin3_derivative(p.y, 0); }

/// D lap^2 w - G lap^3 w + kappa w for the manufactured solution.
inline double mms_source(Point p, double D, double G, double kappa) {
  auto s = [&](double t, int k) { return sin3_derivative(t, k); };
  const double x = p.x, y = p.y;
  const double lap2 = s(x, 4) * s(y, 0) + 2 * s(x, 2) * s(y, 2) + s(x, 0) * s(y, 4);
  const double lap3 = s(x, 6) * s(y, 0) + 3 * s(x, 4) * s(y, 2) + 3 * s(x, 2) * s(y, 4) + s(x, 0) * s(y, 6);
  return D * lap2 - G * lap3 + kappa * s(x, 0) * s(y, 0);
}

/// Interior L2 error of the manufactured solution with kappa = 1 on a spans x spans grid.
inline double mms_error(int spans) {
  const PlateDomain dom;
  const MaterialParams m = material();
  const PlateConstants pc = plate_constants(m);
  const double kappa = 1.0;
  const SpacePtr s = build_space(dom, 5, spans, spans);
  const SparseMatrix K = assemble_stiffness(*s, m);
  const SparseMatrix M = assemble_kappa_mass(*s, ConstantField(kappa));
  const auto g = value_field([&](Point p) { return mms_source(p, pc.D, pc.G, kappa); });
  const SplineFunction w(s, solve_system(K, M, load_vector(*s, *g)));
  const LinearCombinationField diff(1.0, std::make_shared<SplineFunction>(w), -1.0, value_field(mms_solution));
  return l2_norm(diff, interior_region(dom, 0.1));
}

/// sin(pi x) with exact derivatives.
inline FieldPtr sin_pi_x() {
  constexpr double pi = std::numbers::pi;
  return std::make_shared<FunctionField>(
      [](Point p, int order) {
        Partials d(order);
        for (int k = 0; k <= order; ++k) d(k, 0) = std::pow(pi, k) * std::sin(pi * p.x + k * pi / 2);
        return d;
      },
      Partials::kMaxOrder);
}

// Monte-Carlo pair sampling of int int |u(x)-u(y)|^2 / |x-y|^(2+2s): x uniform
// over the bounding box, y = x + r e(theta) with r uniform on [0, R], which
// cancels the near-diagonal singularity for s < 1.
inline double monte_carlo_seminorm(const ScalarField& u, double s, const Region& region, std::size_t n,
                                   std::uint64_t seed) {
  constexpr double pi = std::numbers::pi;
  const Rect box = region.bounding_box();
  const double R = std::hypot(box.x1 - box.x0, box.y1 - box.y0);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(box.x0, box.x1), uy(box.y0, box.y1), ur(0.0, R), ut(0.0, 2 * pi);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point x{ux(rng), uy(rng)};
    const double r = ur(rng), t = ut(rng);
    const Point y{x.x + r * std::cos(t), x.y + r * std::sin(t)};
    if (!region.contains(x) || !region.contains(y)) continue;
    const double du = u.value(x) - u.value(y);
    sum += du * du / std::pow(r, 2 + 2 * s) * r * 2 * pi * R;
  }
  const double box_area = (box.x1 - box.x0) * (box.y1 - box.y0);
  return std::sqrt(box_area * sum / static_cast<double>(n));
}

/// UC surrogates for the centered load with kappa = 2 on the plate minus the load disc.
inline UCReport uc_default_case(int spans) {
  const PlateDomain dom;
  const SpacePtr s = build_space(dom, 5, spans, spans);
  const LoadCase load;
  const Deflection w = solve_plate(s, material(), ConstantField(2.0), load);
  const LoadNeighborhood nb = check_load_neighborhood(w, load);
  const Region U = Region::rect_minus_disc(dom.rect(), load.P0, nb.sigma_bar_emp);
  return run_uc_checks(w, U, UCProbeConfig{});
}

}  // namespace nanoplate::testing
