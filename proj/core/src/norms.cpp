#include "nanoplate/norms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "nanoplate/error.hpp"
#include "nanoplate/parallel.hpp"
#include "nanoplate/quadrature.hpp"

namespace nanoplate {

namespace {

constexpr double kPi = std::numbers::pi;

/// Parameter t > 0 where the ray x + t (cos, sin) leaves the circle, for x inside.
double exit_circle(Point x, double c, double s, Point center, double r) {
  const double dx = x.x - center.x;
  const double dy = x.y - center.y;
  const double b = dx * c + dy * s;
  const double q = dx * dx + dy * dy - r * r;
  const double disc = std::max(0.0, b * b - q);
  return -b + std::sqrt(disc);
}

/// Parameter t > 0 where the ray first enters the circle, or +inf.
double enter_circle(Point x, double c, double s, Point center, double r) {
  const double dx = x.x - center.x;
  const double dy = x.y - center.y;
  const double b = dx * c + dy * s;
  const double q = dx * dx + dy * dy - r * r;
  const double disc = b * b - q;
  if (disc <= 0.0) return std::numeric_limits<double>::infinity();
  const double t = -b - std::sqrt(disc);
  return t > 0.0 ? t : std::numeric_limits<double>::infinity();
}

double exit_rect(Point x, double c, double s, const Rect& r) {
  double t = std::numeric_limits<double>::infinity();
  if (c > 0.0) t = std::min(t, (r.x1 - x.x) / c);
  if (c < 0.0) t = std::min(t, (r.x0 - x.x) / c);
  if (s > 0.0) t = std::min(t, (r.y1 - x.y) / s);
  if (s < 0.0) t = std::min(t, (r.y0 - x.y) / s);
  return std::max(0.0, t);
}

void add_cell(std::vector<QuadPoint>& out, const Rect& cell, const GaussRule& ref, const Region* hole_test) {
  const double hx = cell.width() / 2.0;
  const double hy = cell.height() / 2.0;
  const double mx = (cell.x0 + cell.x1) / 2.0;
  const double my = (cell.y0 + cell.y1) / 2.0;
  for (std::size_t j = 0; j < ref.nodes.size(); ++j)
    for (std::size_t i = 0; i < ref.nodes.size(); ++i) {
      const Point p{mx + hx * ref.nodes[i], my + hy * ref.nodes[j]};
      if (hole_test && !hole_test->contains(p)) continue;
      out.push_back({p, hx * hy * ref.weights[i] * ref.weights[j]});
    }
}

/// Chunked sum with a fixed reduction order.
template <class Fn>
double parallel_sum(int n, int threads, Fn&& term) {
  const int chunks = chunk_count(n, threads);
  std::vector<double> partial(static_cast<std::size_t>(chunks), 0.0);
  parallel_chunks(n, threads, [&](int begin, int end, int chunk) {
    double s = 0.0;
    for (int i = begin; i < end; ++i) s += term(i);
    partial[static_cast<std::size_t>(chunk)] = s;
  });
  double total = 0.0;
  for (double v : partial) total += v;
  return total;
}

/// Components of grad^k u with their tensor multiplicities binomial(k, ny).
void gradient_components(const Partials& d, int k, std::vector<double>& out) {
  out.resize(static_cast<std::size_t>(k + 1));
  for (int ny = 0; ny <= k; ++ny) out[ny] = d(k - ny, ny);
}

}  // namespace

Region Region::rectangle(Rect r) { return Region{Kind::Rectangle, r, {}, 0.0, 0.0}; }

Region Region::disc(Point c, double r) { return Region{Kind::Disc, {}, c, 0.0, r}; }

Region Region::annulus(Point c, double r_in, double r_out) {
  NANOPLATE_THROW_IF(r_in < 0.0, ErrorCode::InvalidParameter, "annulus inner radius must be nonnegative");
  return Region{Kind::Annulus, {}, c, r_in, r_out};
}

Region Region::rect_minus_disc(Rect r, Point c, double radius) {
  return Region{Kind::RectMinusDisc, r, c, radius, 0.0};
}

bool Region::empty() const {
  switch (kind) {
    case Kind::Rectangle: return rect.empty();
    case Kind::Disc: return !(r_outer > 0.0);
    case Kind::Annulus: return !(r_outer > r_inner);
    case Kind::RectMinusDisc: return rect.empty() || area() <= 0.0;
  }
  return true;
}

bool Region::contains(Point p) const {
  const double d = distance(p, center);
  switch (kind) {
    case Kind::Rectangle: return rect.contains(p);
    case Kind::Disc: return d <= r_outer;
    case Kind::Annulus: return d >= r_inner && d <= r_outer;
    case Kind::RectMinusDisc: return rect.contains(p) && d >= r_inner;
  }
  return false;
}

double Region::area() const {
  switch (kind) {
    case Kind::Rectangle: return rect.empty() ? 0.0 : rect.area();
    case Kind::Disc: return kPi * r_outer * r_outer;
    case Kind::Annulus: return kPi * (r_outer * r_outer - r_inner * r_inner);
    case Kind::RectMinusDisc: {
      // Exact only when the disc lies inside the rectangle; otherwise the
      // quadrature weights give the area.
      const bool inside = rect.boundary_distance(center) >= r_inner;
      if (inside) return rect.area() - kPi * r_inner * r_inner;
      double a = 0.0;
      for (const auto& q : region_quadrature(*this, std::min(rect.width(), rect.height()) / 64.0, 4)) a += q.w;
      return a;
    }
  }
  return 0.0;
}

Rect Region::bounding_box() const {
  switch (kind) {
    case Kind::Rectangle:
    case Kind::RectMinusDisc: return rect;
    case Kind::Disc:
    case Kind::Annulus:
      return {center.x - r_outer, center.y - r_outer, center.x + r_outer, center.y + r_outer};
  }
  return rect;
}

double Region::boundary_distance(Point p) const {
  const double d = distance(p, center);
  switch (kind) {
    case Kind::Rectangle: return rect.boundary_distance(p);
    case Kind::Disc: return r_outer - d;
    case Kind::Annulus: return std::min(r_outer - d, d - r_inner);
    case Kind::RectMinusDisc: return std::min(rect.boundary_distance(p), d - r_inner);
  }
  return 0.0;
}

double Region::reach(Point x, double theta, double rmax) const {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  double t = rmax;
  switch (kind) {
    case Kind::Rectangle: t = std::min(t, exit_rect(x, c, s, rect)); break;
    case Kind::Disc: t = std::min(t, exit_circle(x, c, s, center, r_outer)); break;
    case Kind::Annulus:
      t = std::min({t, exit_circle(x, c, s, center, r_outer), enter_circle(x, c, s, center, r_inner)});
      break;
    case Kind::RectMinusDisc:
      t = std::min({t, exit_rect(x, c, s, rect), enter_circle(x, c, s, center, r_inner)});
      break;
  }
  return std::max(0.0, t);
}

nlohmann::json Region::to_json() const {
  switch (kind) {
    case Kind::Rectangle:
      return {{"kind", "rectangle"}, {"rect", {rect.x0, rect.y0, rect.x1, rect.y1}}};
    case Kind::Disc: return {{"kind", "disc"}, {"center", {center.x, center.y}}, {"radius", r_outer}};
    case Kind::Annulus:
      return {{"kind", "annulus"}, {"center", {center.x, center.y}}, {"r_inner", r_inner}, {"r_outer", r_outer}};
    case Kind::RectMinusDisc:
      return {{"kind", "rect_minus_disc"},
              {"rect", {rect.x0, rect.y0, rect.x1, rect.y1}},
              {"center", {center.x, center.y}},
              {"radius", r_inner}};
  }
  return {};
}

std::vector<QuadPoint> region_quadrature(const Region& region, double h, int order) {
  NANOPLATE_THROW_IF(region.empty(), ErrorCode::EmptyRegion, "integration region is empty");
  NANOPLATE_THROW_IF(!(h > 0.0) || order < 1, ErrorCode::InvalidParameter, "quadrature resolution must be positive");
  const GaussRule ref = gauss_legendre(order);
  std::vector<QuadPoint> out;
  if (region.kind == Region::Kind::Disc || region.kind == Region::Kind::Annulus) {
    const double r0 = region.kind == Region::Kind::Disc ? 0.0 : region.r_inner;
    const double r1 = region.r_outer;
    const int nr = std::max(2, static_cast<int>(std::ceil((r1 - r0) / h)));
    const int nt = std::max(8, static_cast<int>(std::ceil(2.0 * kPi * r1 / h)));
    for (int ir = 0; ir < nr; ++ir) {
      const GaussRule gr = gauss_legendre(order, r0 + (r1 - r0) * ir / nr, r0 + (r1 - r0) * (ir + 1) / nr);
      for (int it = 0; it < nt; ++it) {
        const GaussRule gt = gauss_legendre(order, 2.0 * kPi * it / nt, 2.0 * kPi * (it + 1) / nt);
        for (int j = 0; j < order; ++j)
          for (int i = 0; i < order; ++i) {
            const double r = gr.nodes[i];
            out.push_back({{region.center.x + r * std::cos(gt.nodes[j]), region.center.y + r * std::sin(gt.nodes[j])},
                           gr.weights[i] * gt.weights[j] * r});
          }
      }
    }
    return out;
  }
  const Rect& R = region.rect;
  const int nx = std::max(1, static_cast<int>(std::ceil(R.width() / h)));
  const int ny = std::max(1, static_cast<int>(std::ceil(R.height() / h)));
  const bool holed = region.kind == Region::Kind::RectMinusDisc && region.r_inner > 0.0;
  constexpr int kSub = 8;  // subdivision of cells crossed by the hole boundary
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const Rect cell{R.x0 + R.width() * i / nx, R.y0 + R.height() * j / ny, R.x0 + R.width() * (i + 1) / nx,
                      R.y0 + R.height() * (j + 1) / ny};
      if (!holed) {
        add_cell(out, cell, ref, nullptr);
        continue;
      }
      const double nearx = std::clamp(region.center.x, cell.x0, cell.x1);
      const double neary = std::clamp(region.center.y, cell.y0, cell.y1);
      const double near = distance(region.center, {nearx, neary});
      const double farx = std::max(std::abs(cell.x0 - region.center.x), std::abs(cell.x1 - region.center.x));
      const double fary = std::max(std::abs(cell.y0 - region.center.y), std::abs(cell.y1 - region.center.y));
      const double far = std::hypot(farx, fary);
      if (near >= region.r_inner) {
        add_cell(out, cell, ref, nullptr);
      } else if (far > region.r_inner) {
        for (int b = 0; b < kSub; ++b)
          for (int a = 0; a < kSub; ++a) {
            const Rect sub{cell.x0 + cell.width() * a / kSub, cell.y0 + cell.height() * b / kSub,
                           cell.x0 + cell.width() * (a + 1) / kSub, cell.y0 + cell.height() * (b + 1) / kSub};
            add_cell(out, sub, ref, &region);
          }
      }
    }
  return out;
}

void NormConfig::validate() const {
  NANOPLATE_THROW_IF(!(rho0 > 0.0), ErrorCode::InvalidParameter, "rho0 must be positive");
  NANOPLATE_THROW_IF(volume_cells < 1 || volume_order < 1 || pair_cells < 1 || pair_order < 1 || cutoff_angles < 4,
                     ErrorCode::InvalidParameter, "norm quadrature resolutions must be positive");
  NANOPLATE_THROW_IF(cutoff < 0.0, ErrorCode::InvalidParameter, "cutoff must be positive (or 0 for automatic)");
}

double NormConfig::pair_cell_size(const Region& region) const {
  const Rect b = region.bounding_box();
  return std::min(b.width(), b.height()) / pair_cells;
}

double NormConfig::cutoff_for(const Region& region) const {
  return cutoff > 0.0 ? cutoff : std::sqrt(2.0) * pair_cell_size(region);
}

nlohmann::json NormConfig::to_json() const {
  return {{"rho0", rho0},           {"volume_cells", volume_cells}, {"volume_order", volume_order},
          {"pair_cells", pair_cells}, {"pair_order", pair_order},   {"cutoff", cutoff},
          {"cutoff_angles", cutoff_angles}};
}

namespace {

std::vector<QuadPoint> volume_rule(const Region& region, const NormConfig& cfg) {
  cfg.validate();
  const Rect b = region.bounding_box();
  return region_quadrature(region, std::min(b.width(), b.height()) / cfg.volume_cells, cfg.volume_order);
}

}  // namespace

double l2_norm(const ScalarField& u, const Region& region, const NormConfig& cfg) {
  const auto pts = volume_rule(region, cfg);
  const double s = parallel_sum(static_cast<int>(pts.size()), cfg.threads, [&](int i) {
    const double v = u.value(pts[i].p);
    return pts[i].w * v * v;
  });
  return std::sqrt(s) / cfg.rho0;
}

double hk_norm(const ScalarField& u, int k, const Region& region, const NormConfig& cfg) {
  NANOPLATE_THROW_IF(k < 0, ErrorCode::InvalidParameter, "Sobolev order must be nonnegative");
  NANOPLATE_THROW_IF(k > u.max_order() || k > Partials::kMaxOrder, ErrorCode::OrderTooHigh,
                     "H^" + std::to_string(k) + " norm needs derivatives the field does not provide");
  const auto pts = volume_rule(region, cfg);
  const double s = parallel_sum(static_cast<int>(pts.size()), cfg.threads, [&](int i) {
    const Partials d = u.partials(pts[i].p, k);
    double acc = 0.0;
    double scale = 1.0;
    for (int order = 0; order <= k; ++order) {
      acc += scale * d.gradient_norm_sq(order);
      scale *= cfg.rho0 * cfg.rho0;
    }
    return pts[i].w * acc;
  });
  return std::sqrt(s) / cfg.rho0;
}

double fractional_seminorm(const ScalarField& u, double s, const Region& region, const NormConfig& cfg, int k) {
  NANOPLATE_THROW_IF(!(s > 0.0 && s < 1.0), ErrorCode::InvalidParameter, "fractional order s must lie in (0, 1)");
  NANOPLATE_THROW_IF(k < 0 || k + 1 > u.max_order() || k + 1 > Partials::kMaxOrder, ErrorCode::OrderTooHigh,
                     "fractional seminorm of grad^" + std::to_string(k) + " needs order " + std::to_string(k + 1) +
                         " derivatives");
  cfg.validate();
  const auto pts = region_quadrature(region, cfg.pair_cell_size(region), cfg.pair_order);
  const double delta = cfg.cutoff_for(region);
  const int n = static_cast<int>(pts.size());
  const int m = k + 1;

  // Components of grad^k u and of grad^(k+1) u at every point.
  std::vector<double> comp(static_cast<std::size_t>(n * m));
  std::vector<Partials> next(static_cast<std::size_t>(n));
  std::vector<double> mult(static_cast<std::size_t>(m));
  for (int a = 0; a < m; ++a) mult[a] = binomial(k, a);
  parallel_chunks(n, cfg.threads, [&](int begin, int end, int) {
    std::vector<double> c;
    for (int i = begin; i < end; ++i) {
      next[i] = u.partials(pts[i].p, k + 1);
      gradient_components(next[i], k, c);
      std::copy(c.begin(), c.end(), comp.begin() + static_cast<std::ptrdiff_t>(i) * m);
    }
  });

  const double delta2 = delta * delta;
  const double expo = 1.0 + s;  // |x-y|^(2+2s) = (r^2)^(1+s)
  const double far = parallel_sum(n, cfg.threads, [&](int i) {
    const Point xi = pts[i].p;
    const double* ci = comp.data() + static_cast<std::ptrdiff_t>(i) * m;
    double acc = 0.0;
    for (int j = 0; j < n; ++j) {
      const double dx = pts[j].p.x - xi.x;
      const double dy = pts[j].p.y - xi.y;
      const double r2 = dx * dx + dy * dy;
      if (r2 < delta2) continue;
      const double* cj = comp.data() + static_cast<std::ptrdiff_t>(j) * m;
      double diff = 0.0;
      for (int a = 0; a < m; ++a) {
        const double d = ci[a] - cj[a];
        diff += mult[a] * d * d;
      }
      acc += pts[j].w * diff / std::pow(r2, expo);
    }
    return pts[i].w * acc;
  });

  // Near-diagonal part: |grad^k u(x) - grad^k u(x + r e)|^2 ~ r^2 |d_e grad^k u(x)|^2,
  // integrated over r in (0, reach(x, e)) with weight r^(1 - 2s).
  const int na = cfg.cutoff_angles;
  const double dtheta = 2.0 * kPi / na;
  const double near = parallel_sum(n, cfg.threads, [&](int i) {
    const Partials& d = next[i];
    double acc = 0.0;
    for (int t = 0; t < na; ++t) {
      const double th = (t + 0.5) * dtheta;
      const double c = std::cos(th);
      const double sn = std::sin(th);
      const double R = region.reach(pts[i].p, th, delta);
      double dir = 0.0;
      for (int a = 0; a < m; ++a) {
        const double g = c * d(k - a + 1, a) + sn * d(k - a, a + 1);
        dir += mult[a] * g * g;
      }
      acc += dir * std::pow(R, 2.0 - 2.0 * s) / (2.0 - 2.0 * s);
    }
    return pts[i].w * acc * dtheta;
  });
  return std::sqrt(std::max(0.0, far + near));
}

double fractional_norm(const ScalarField& u, int k, double s, const Region& region, const NormConfig& cfg) {
  return hk_norm(u, k, region, cfg) + std::pow(cfg.rho0, k + s - 1.0) * fractional_seminorm(u, s, region, cfg, k);
}

double frequency_ratio(const ScalarField& w, const Region& region, const NormConfig& cfg) {
  const double l2 = l2_norm(w, region, cfg);
  NANOPLATE_THROW_IF(!(l2 > 0.0) || !std::isfinite(l2), ErrorCode::DegenerateSolution,
                     "frequency ratio undefined: L2 norm on the region vanishes");
  return (l2 + std::pow(cfg.rho0, -0.5) * fractional_seminorm(w, 0.5, region, cfg)) / l2;
}

Region interior_region(const PlateDomain& domain, double r) {
  NANOPLATE_THROW_IF(r < 0.0, ErrorCode::InvalidParameter, "interior margin must be nonnegative");
  return Region::rectangle({r, r, domain.Lx - r, domain.Ly - r});
}

Admissibility kappa_admissibility(const ScalarField& kappa, double s, double kbar, const PlateDomain& domain,
                                  const NormConfig& cfg) {
  Admissibility a;
  a.bound = kbar / domain.rho0;
  const Region omega = Region::rectangle(domain.rect());
  // Sup norm and sign on a dense grid plus the volume quadrature points.
  double sup = 0.0;
  double inf = std::numeric_limits<double>::infinity();
  const int ns = 4 * cfg.volume_cells;
  for (int j = 0; j <= ns; ++j)
    for (int i = 0; i <= ns; ++i) {
      const double v = kappa.value({domain.Lx * i / ns, domain.Ly * j / ns});
      sup = std::max(sup, std::abs(v));
      inf = std::min(inf, v);
    }
  for (const auto& q : volume_rule(omega, cfg)) {
    const double v = kappa.value(q.p);
    sup = std::max(sup, std::abs(v));
    inf = std::min(inf, v);
  }
  a.sup_norm = sup;
  a.nonnegative = inf >= 0.0;
  a.seminorm_term = kappa.is_constant() ? 0.0
                                        : std::pow(domain.rho0, s - 1.0) * fractional_seminorm(kappa, s, omega, cfg);
  a.pass = a.nonnegative && a.sup_norm + a.seminorm_term <= a.bound;
  return a;
}

InterpolationDiagnostic interpolation_diagnostic(const SplineFunction& w, double s, const Region& region,
                                                 const NormConfig& cfg) {
  InterpolationDiagnostic d;
  if (w.space().degree() < 7) {
    d.reason = "unavailable: degree " + std::to_string(w.space().degree()) +
               " splines have no H^s-regular sixth gradient (needs degree >= 7)";
    return d;
  }
  const double h6 = hk_norm(w, 6, region, cfg);
  const double h6s = fractional_norm(w, 6, s, region, cfg);
  const double l2 = l2_norm(w, region, cfg);
  if (!(h6 > 0.0 && h6s > 0.0 && l2 > 0.0)) {
    d.reason = "unavailable: vanishing norm";
    return d;
  }
  d.available = true;
  d.log_h6 = std::log(h6);
  d.log_h6s = std::log(h6s);
  d.log_l2 = std::log(l2);
  d.log_C = d.log_h6 - 6.0 / (6.0 + s) * d.log_h6s - s / (6.0 + s) * d.log_l2;
  return d;
}

nlohmann::json norm_record(const std::string& norm, const Region& region, double value, const NormConfig& cfg) {
  return {{"norm", norm}, {"region", region.to_json()}, {"value", value}, {"quadrature_meta", cfg.to_json()}};
}

}  // namespace nanoplate
