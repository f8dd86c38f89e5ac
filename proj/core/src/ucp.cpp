#include "nanoplate/ucp.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "nanoplate/error.hpp"
#include "nanoplate/parallel.hpp"

namespace nanoplate {

void UCProbeConfig::validate() const {
  NANOPLATE_THROW_IF(!(tau > 0.0), ErrorCode::InvalidParameter, "probe radius factor tau must be positive");
  NANOPLATE_THROW_IF(margin_factor < 0.0, ErrorCode::InvalidParameter, "probe margin must be nonnegative");
  NANOPLATE_THROW_IF(grid < 1 || disc_cells < 1 || disc_order < 1, ErrorCode::InvalidParameter,
                     "probe resolutions must be positive");
  NANOPLATE_THROW_IF(!(p > 1.0), ErrorCode::InvalidParameter, "A_p exponent must exceed 1");
  NANOPLATE_THROW_IF(!(rho0 > 0.0), ErrorCode::InvalidParameter, "rho0 must be positive");
}

std::vector<Point> probe_centers(const Region& U, const UCProbeConfig& cfg) {
  cfg.validate();
  const Rect b = U.bounding_box();
  const double margin = std::max(cfg.margin_factor, 1.0) * cfg.tau * cfg.rho0;
  std::vector<Point> out;
  for (int j = 0; j < cfg.grid; ++j)
    for (int i = 0; i < cfg.grid; ++i) {
      const Point c{b.x0 + b.width() * (i + 0.5) / cfg.grid, b.y0 + b.height() * (j + 0.5) / cfg.grid};
      if (U.contains(c) && U.boundary_distance(c) >= margin) out.push_back(c);
    }
  return out;
}

namespace {

struct DiscSamples {
  std::vector<double> w;
  std::vector<double> weight;
  double area = 0.0;
};

DiscSamples sample_disc(const ScalarField& w, Point c, const UCProbeConfig& cfg) {
  const double r = cfg.tau * cfg.rho0;
  DiscSamples s;
  for (const auto& q : region_quadrature(Region::disc(c, r), r / cfg.disc_cells, cfg.disc_order)) {
    s.w.push_back(w.value(q.p));
    s.weight.push_back(q.w);
    s.area += q.w;
  }
  return s;
}

double integral_sq(const ScalarField& w, const Region& U, const NormConfig& cfg) {
  const double n = l2_norm(w, U, cfg) * cfg.rho0;
  return n * n;
}

}  // namespace

Propagation propagation_constant(const ScalarField& w, const Region& U, const UCProbeConfig& cfg) {
  return propagation_constant(w, U, probe_centers(U, cfg), cfg);
}

Propagation propagation_constant(const ScalarField& w, const Region& U, const std::vector<Point>& centers,
                                 const UCProbeConfig& cfg) {
  cfg.validate();
  NANOPLATE_THROW_IF(centers.empty(), ErrorCode::EmptyProbeSet, "no probe center keeps the required margin in U");
  NormConfig nc = cfg.norms;
  nc.rho0 = cfg.rho0;
  const double total = integral_sq(w, U, nc);
  NANOPLATE_THROW_IF(!(total > 0.0), ErrorCode::DegenerateSolution, "deflection vanishes on U");
  Propagation out;
  out.ratios.resize(centers.size());
  parallel_chunks(static_cast<int>(centers.size()), cfg.threads, [&](int begin, int end, int) {
    for (int i = begin; i < end; ++i) {
      const DiscSamples s = sample_disc(w, centers[i], cfg);
      double e = 0.0;
      for (std::size_t k = 0; k < s.w.size(); ++k) e += s.weight[k] * s.w[k] * s.w[k];
      out.ratios[i] = e / total;
    }
  });
  const auto it = std::min_element(out.ratios.begin(), out.ratios.end());
  out.constant = *it;
  out.argmin = centers[static_cast<std::size_t>(it - out.ratios.begin())];
  return out;
}

ApConstant ap_constant(const ScalarField& w, const Region& U, const std::vector<Point>& centers,
                       const UCProbeConfig& cfg, double p, double eta) {
  cfg.validate();
  NANOPLATE_THROW_IF(!(p > 1.0), ErrorCode::InvalidParameter, "A_p exponent must exceed 1");
  NANOPLATE_THROW_IF(centers.empty(), ErrorCode::EmptyProbeSet, "no probe center keeps the required margin in U");
  NormConfig nc = cfg.norms;
  const Rect b = U.bounding_box();
  double wmax = 0.0;
  for (const auto& q : region_quadrature(U, std::min(b.width(), b.height()) / nc.volume_cells, nc.volume_order))
    wmax = std::max(wmax, std::abs(w.value(q.p)));
  NANOPLATE_THROW_IF(!(wmax > 0.0), ErrorCode::DegenerateSolution, "deflection vanishes on U");
  const double floor = eta * wmax;
  const double q = -2.0 / (p - 1.0);

  ApConstant out;
  out.eta = eta;
  out.products.resize(centers.size());
  parallel_chunks(static_cast<int>(centers.size()), cfg.threads, [&](int begin, int end, int) {
    for (int i = begin; i < end; ++i) {
      const DiscSamples s = sample_disc(w, centers[i], cfg);
      double m2 = 0.0;
      double mq = 0.0;
      for (std::size_t k = 0; k < s.w.size(); ++k) {
        const double a = std::max(std::abs(s.w[k]), floor);
        m2 += s.weight[k] * s.w[k] * s.w[k];
        mq += s.weight[k] * std::pow(a, q);
      }
      m2 /= s.area;
      mq /= s.area;
      out.products[i] = m2 * std::pow(mq, p - 1.0);
    }
  });
  std::size_t arg = 0;
  for (std::size_t i = 0; i < out.products.size(); ++i) {
    if (!std::isfinite(out.products[i])) {
      arg = i;
      out.finite = false;
      break;
    }
    if (out.products[i] > out.products[arg]) arg = i;
  }
  out.argmax = centers[arg];
  out.value = out.finite ? out.products[arg] : std::numeric_limits<double>::infinity();
  return out;
}

UCReport run_uc_checks(const ScalarField& w, const Region& U, const UCProbeConfig& cfg) {
  UCReport r;
  r.centers = probe_centers(U, cfg);
  r.tau = cfg.tau;
  r.p = cfg.p;
  r.propagation = propagation_constant(w, U, r.centers, cfg);
  for (double eta : cfg.etas) r.ap.push_back(ap_constant(w, U, r.centers, cfg, cfg.p, eta));
  NormConfig nc = cfg.norms;
  nc.rho0 = cfg.rho0;
  nc.threads = cfg.threads;
  r.frequency_ratio = frequency_ratio(w, U, nc);
  return r;
}

nlohmann::json UCReport::to_json() const {
  nlohmann::json ap_list = nlohmann::json::array();
  for (const auto& a : ap) {
    nlohmann::json item = {{"eta", a.eta}, {"finite", a.finite}, {"argmax", {a.argmax.x, a.argmax.y}}};
    item["value"] = a.finite ? nlohmann::json(a.value) : nlohmann::json("inf");
    ap_list.push_back(std::move(item));
  }
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < centers.size(); ++i) {
    nlohmann::json products = nlohmann::json::array();
    for (const auto& a : ap) products.push_back(std::isfinite(a.products[i]) ? nlohmann::json(a.products[i]) : "inf");
    rows.push_back({{"center", {centers[i].x, centers[i].y}},
                    {"tau", tau},
                    {"energy_ratio", propagation.ratios[i]},
                    {"ap_product", products}});
  }
  return {{"tau", tau},
          {"p", p},
          {"propagation_constant", propagation.constant},
          {"propagation_argmin", {propagation.argmin.x, propagation.argmin.y}},
          {"ap_constant", ap_list},
          {"frequency_ratio", frequency_ratio},
          {"probes", rows}};
}

std::string UCReport::to_csv() const {
  std::ostringstream os;
  os << std::setprecision(17) << "center_x,center_y,tau,energy_ratio,ap_product,eta\n";
  for (std::size_t i = 0; i < centers.size(); ++i)
    for (const auto& a : ap)
      os << centers[i].x << ',' << centers[i].y << ',' << tau << ',' << propagation.ratios[i] << ','
         << a.products[i] << ',' << a.eta << '\n';
  return os.str();
}

}  // namespace nanoplate
