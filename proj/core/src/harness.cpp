#include "nanoplate/harness.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "nanoplate/error.hpp"
#include "nanoplate/parallel.hpp"
#include "nanoplate/svg_plot.hpp"

namespace nanoplate {

namespace {

constexpr double kPi = std::numbers::pi;

class BumpField final : public ScalarField {
 public:
  BumpField(double base, double amp, Point c, double width) : base_(base), amp_(amp), c_(c), w_(width) {}

  [[nodiscard]] Partials partials(Point p, int order) const override {
    // exp(-|x-c|^2 / (2 w^2)) factorizes; d^n/dx^n e^{-u^2/2} = (-1)^n He_n(u) e^{-u^2/2} / w^n.
    NANOPLATE_THROW_IF(order > Partials::kMaxOrder, ErrorCode::OrderTooHigh, "derivative order too high");
    const double ux = (p.x - c_.x) / w_;
    const double uy = (p.y - c_.y) / w_;
    double hx[Partials::kMaxOrder + 1];
    double hy[Partials::kMaxOrder + 1];
    hermite(ux, order, hx);
    hermite(uy, order, hy);
    const double g = amp_ * std::exp(-0.5 * (ux * ux + uy * uy));
    Partials out(order);
    for (int total = 0; total <= order; ++total)
      for (int ny = 0; ny <= total; ++ny) {
        const int nx = total - ny;
        const double sign = (total % 2 == 0) ? 1.0 : -1.0;
        out(nx, ny) = sign * g * hx[nx] * hy[ny] / std::pow(w_, total);
      }
    out(0, 0) += base_;
    return out;
  }
  [[nodiscard]] int max_order() const override { return Partials::kMaxOrder; }
  [[nodiscard]] std::string describe() const override {
    std::ostringstream os;
    os.precision(17);
    os << "bump(base=" << base_ << ", amplitude=" << amp_ << ", center=(" << c_.x << ", " << c_.y
       << "), width=" << w_ << ")";
    return os.str();
  }

 private:
  static void hermite(double u, int n, double* h) {
    h[0] = 1.0;
    if (n >= 1) h[1] = u;
    for (int k = 2; k <= n; ++k) h[k] = u * h[k - 1] - (k - 1) * h[k - 2];
  }
  double base_, amp_;
  Point c_;
  double w_;
};

/// base + sum a_mn cos(m pi x / Lx) cos(n pi y / Ly), 1 <= m + n, m, n <= modes.
class CosineSeriesField final : public ScalarField {
 public:
  CosineSeriesField(double base, std::vector<double> coeffs, int modes, double Lx, double Ly, std::string tag)
      : base_(base), a_(std::move(coeffs)), modes_(modes), Lx_(Lx), Ly_(Ly), tag_(std::move(tag)) {}

  [[nodiscard]] Partials partials(Point p, int order) const override {
    Partials out(order);
    out(0, 0) = base_;
    for (int n = 0; n <= modes_; ++n)
      for (int m = 0; m <= modes_; ++m) {
        const double a = a_[static_cast<std::size_t>(n * (modes_ + 1) + m)];
        if (a == 0.0) continue;
        const double kx = m * kPi / Lx_;
        const double ky = n * kPi / Ly_;
        for (int total = 0; total <= order; ++total)
          for (int dy = 0; dy <= total; ++dy) {
            const int dx = total - dy;
            out(dx, dy) += a * trig(kx, p.x, dx) * trig(ky, p.y, dy);
          }
      }
    return out;
  }
  [[nodiscard]] int max_order() const override { return Partials::kMaxOrder; }
  [[nodiscard]] std::string describe() const override { return tag_; }

 private:
  /// d^k/dx^k cos(w x).
  static double trig(double w, double x, int k) {
    const double pw = std::pow(w, k);
    switch (k % 4) {
      case 0: return pw * std::cos(w * x);
      case 1: return -pw * std::sin(w * x);
      case 2: return -pw * std::cos(w * x);
      default: return pw * std::sin(w * x);
    }
  }
  double base_;
  std::vector<double> a_;
  int modes_;
  double Lx_, Ly_;
  std::string tag_;
};

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Integral of g over the region's volume quadrature.
template <class Fn>
double integrate(const Region& region, const NormConfig& cfg, Fn&& g) {
  const Rect b = region.bounding_box();
  double s = 0.0;
  for (const auto& q : region_quadrature(region, std::min(b.width(), b.height()) / cfg.volume_cells, cfg.volume_order))
    s += q.w * g(q.p);
  return s;
}

FunctionField difference_field(const ScalarField& a, const ScalarField& b) {
  return FunctionField(
      [&a, &b](Point p, int order) {
        Partials pa = a.partials(p, order);
        const Partials pb = b.partials(p, order);
        for (int t = 0; t <= order; ++t)
          for (int ny = 0; ny <= t; ++ny) pa(t - ny, ny) -= pb(t - ny, ny);
        return pa;
      },
      std::min(a.max_order(), b.max_order()));
}

}  // namespace

KappaFamily::Kind kappa_family_kind(const std::string& name) {
  if (name == "constant") return KappaFamily::Kind::Constant;
  if (name == "bump") return KappaFamily::Kind::Bump;
  if (name == "band_limited") return KappaFamily::Kind::BandLimited;
  if (name == "expression") return KappaFamily::Kind::Expression;
  throw Error(ErrorCode::InvalidConfig,
              "unknown kappa family '" + name + "' (expected constant, bump, band_limited or expression)");
}

std::string to_string(KappaFamily::Kind kind) {
  switch (kind) {
    case KappaFamily::Kind::Constant: return "constant";
    case KappaFamily::Kind::Bump: return "bump";
    case KappaFamily::Kind::BandLimited: return "band_limited";
    case KappaFamily::Kind::Expression: return "expression";
  }
  return "?";
}

FieldPtr KappaFamily::make(const PlateDomain& domain, std::uint64_t draw) const {
  switch (kind) {
    case Kind::Constant: return std::make_shared<ConstantField>(base);
    case Kind::Bump: return std::make_shared<BumpField>(base, amplitude, center, width);
    case Kind::Expression: return make_field(expression);
    case Kind::BandLimited: {
      std::mt19937_64 rng(splitmix(seed) ^ splitmix(draw + 0x51ed27));
      std::normal_distribution<double> normal(0.0, 1.0);
      const int n1 = modes + 1;
      std::vector<double> a(static_cast<std::size_t>(n1 * n1), 0.0);
      double norm = 0.0;
      for (int n = 0; n <= modes; ++n)
        for (int m = 0; m <= modes; ++m) {
          if (m + n == 0) continue;
          // Decaying spectrum keeps the draws inside the H^s class.
          const double v = normal(rng) / (1.0 + m * m + n * n);
          a[static_cast<std::size_t>(n * n1 + m)] = v;
          norm += std::abs(v);
        }
      for (double& v : a) v *= norm > 0.0 ? amplitude / norm : 0.0;
      return std::make_shared<CosineSeriesField>(base, std::move(a), modes, domain.Lx, domain.Ly,
                                                 "band_limited(seed=" + std::to_string(seed) +
                                                     ", draw=" + std::to_string(draw) + ")");
    }
  }
  throw Error(ErrorCode::InvalidConfig, "unknown kappa family");
}

nlohmann::json KappaFamily::to_json() const {
  nlohmann::json j = {{"family", to_string(kind)}, {"base", base}};
  if (kind == Kind::Bump) {
    j["amplitude"] = amplitude;
    j["center"] = {center.x, center.y};
    j["width"] = width;
  } else if (kind == Kind::BandLimited) {
    j["amplitude"] = amplitude;
    j["modes"] = modes;
    j["seed"] = seed;
  } else if (kind == Kind::Expression) {
    j["expression"] = expression;
  }
  return j;
}

void ExperimentConfig::validate() const {
  domain.validate();
  material.validate();
  load.validate(domain);
  NANOPLATE_THROW_IF(!(sigma > 0.0) || 2.0 * sigma * domain.rho0 >= std::min(domain.Lx, domain.Ly),
                     ErrorCode::InvalidConfig, "sigma must be positive and leave a nonempty interior region");
  NANOPLATE_THROW_IF(!(s > 0.0 && s < 1.0), ErrorCode::InvalidConfig, "s must lie in (0, 1)");
  NANOPLATE_THROW_IF(!(kbar > 0.0), ErrorCode::InvalidConfig, "kbar must be positive");
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    NANOPLATE_THROW_IF(!(epsilons[i] > 0.0), ErrorCode::InvalidConfig, "epsilon levels must be positive");
    NANOPLATE_THROW_IF(i > 0 && !(epsilons[i] > epsilons[i - 1]), ErrorCode::InvalidConfig,
                       "epsilon levels must be strictly increasing");
  }
  NANOPLATE_THROW_IF(alphas.empty(), ErrorCode::InvalidConfig, "alpha sweep is empty");
  for (double a : alphas) NANOPLATE_THROW_IF(!(a > 0.0), ErrorCode::InvalidConfig, "alpha values must be positive");
  NANOPLATE_THROW_IF(sample_grid < 2, ErrorCode::InvalidConfig, "sample grid must have at least 2 nodes per side");
  NANOPLATE_THROW_IF(threads < 1, ErrorCode::InvalidConfig, "threads must be at least 1");
  NANOPLATE_THROW_IF(spans % coef_coarsening != 0, ErrorCode::InvalidConfig,
                     "spans must be divisible by the coefficient coarsening");
}

nlohmann::json ExperimentConfig::to_json() const {
  return {
      {"domain", {{"Lx", domain.Lx}, {"Ly", domain.Ly}, {"rho0", domain.rho0}, {"M1", domain.M1}}},
      {"material",
       {{"t", material.t},
        {"l0", material.l0},
        {"l1", material.l1},
        {"l2", material.l2},
        {"alpha0", material.alpha0},
        {"gamma0", material.gamma0},
        {"mu", material.mu ? material.mu->describe() : ""},
        {"lambda", material.lambda ? material.lambda->describe() : ""}}},
      {"load", {{"P0", {load.P0.x, load.P0.y}}, {"f_bar", load.f_bar}, {"d", load.d}}},
      {"discretization", {{"degree", degree}, {"spans", spans}, {"coef_coarsening", coef_coarsening}}},
      {"sigma", sigma},
      {"s", s},
      {"kbar", kbar},
      {"kappa", kappa.to_json()},
      {"epsilons", epsilons},
      {"seeds", seeds},
      {"alphas", alphas},
      {"shifts", shifts},
      {"sample_grid", sample_grid},
      {"include_P0", include_P0},
      {"mask_threshold", mask_threshold},
  };
}

ExperimentConfig default_experiment() {
  ExperimentConfig cfg;
  cfg.material.mu = std::make_shared<ConstantField>(1.0);
  cfg.material.lambda = std::make_shared<ConstantField>(1.0);
  return cfg;
}

nlohmann::json PairRecord::to_json() const {
  return {{"epsilon", epsilon},
          {"weighted_misfit", weighted_misfit},
          {"kappa_gap", kappa_gap},
          {"misfit_bound", misfit_bound},
          {"sigma", sigma}};
}

Experiment::Experiment(ExperimentConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
  space_ = build_space(cfg_.domain, cfg_.degree, cfg_.spans, cfg_.spans);
  coef_space_ = coefficient_space_for(*space_, cfg_.coef_coarsening);
  K_ = assemble_stiffness(*space_, cfg_.material);
  F_ = point_load_vector(*space_, cfg_.load.P0, cfg_.load.f(cfg_.domain.rho0), cfg_.load.d);
}

Region Experiment::interior() const { return interior_region(cfg_.domain, cfg_.sigma * cfg_.domain.rho0); }

Deflection Experiment::solve(const ScalarField& kappa) const {
  const SparseMatrix M = assemble_kappa_mass(*space_, kappa);
  DeflectionMeta meta{kappa.describe(), material_hash(cfg_.material), cfg_.load.f(cfg_.domain.rho0), cfg_.load.P0};
  return solve_direct(space_, K_, M, F_, std::move(meta), cfg_.solve);
}

Admissibility Experiment::admissibility(const ScalarField& kappa) const {
  NormConfig nc = cfg_.norms;
  nc.rho0 = cfg_.domain.rho0;
  return kappa_admissibility(kappa, cfg_.s, cfg_.kbar, cfg_.domain, nc);
}

PairRecord Experiment::run_pair(const ScalarField& kappa1, const ScalarField& kappa2) const {
  for (const ScalarField* k : {&kappa1, &kappa2}) {
    const Admissibility a = admissibility(*k);
    if (!a.pass) {
      std::ostringstream os;
      os << "foundation modulus '" << k->describe() << "' is not admissible: sup " << a.sup_norm
         << " + seminorm term " << a.seminorm_term << " vs bound " << a.bound
         << (a.nonnegative ? "" : " (negative values)");
      throw Error(ErrorCode::InvalidCoefficient, os.str());
    }
  }
  const Deflection w1 = solve(kappa1);
  const Deflection w2 = solve(kappa2);
  NormConfig nc = cfg_.norms;
  nc.rho0 = cfg_.domain.rho0;
  const SplineFunction gap(space_, w1.coefficients() - w2.coefficients());
  const Region omega = Region::rectangle(cfg_.domain.rect());
  const Region inner = interior();

  PairRecord rec;
  rec.sigma = cfg_.sigma;
  rec.epsilon = l2_norm(gap, omega, nc) / (cfg_.domain.rho0 * cfg_.load.f_bar);
  rec.weighted_misfit = integrate(inner, nc, [&](Point p) {
    const double dk = kappa2.value(p) - kappa1.value(p);
    const double w = w1.value(p);
    return dk * dk * w * w;
  });
  const FunctionField dk = difference_field(kappa1, kappa2);
  rec.kappa_gap = l2_norm(dk, inner, nc);
  const double kb = cfg_.kbar / cfg_.domain.rho0;
  rec.misfit_bound = kb * kb * integrate(inner, nc, [&](Point p) {
    const double w = w1.value(p);
    return w * w;
  });
  return rec;
}

nlohmann::json SweepRecord::to_json() const {
  return {{"epsilon", epsilon},
          {"seed", seed},
          {"realized_gap", realized_gap},
          {"alpha", alpha},
          {"noise_level", noise_level},
          {"error", error},
          {"relative_error", relative_error},
          {"residual", residual},
          {"mask_fraction", mask_fraction},
          {"sigma", sigma},
          {"degenerate", degenerate},
          {"note", note}};
}

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  NANOPLATE_THROW_IF(x.size() != y.size() || x.size() < 2, ErrorCode::InvalidParameter,
                     "line fit needs at least two points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double den = n * sxx - sx * sx;
  NANOPLATE_THROW_IF(den == 0.0, ErrorCode::DegenerateData, "line fit abscissae coincide");
  LinearFit f;
  f.slope = (n * sxy - sx * sy) / den;
  f.intercept = (sy - f.slope * sx) / n;
  return f;
}

nlohmann::json KeyEstimate::to_json() const {
  nlohmann::json recs = nlohmann::json::array();
  for (const auto& r : records) recs.push_back(r.to_json());
  return {{"required_slope", required_slope}, {"fitted_slope", fitted_slope}, {"log_C", log_C},
          {"worst_slack", worst_slack},       {"pass", pass},                 {"records", recs}};
}

KeyEstimate verify_key_estimate(const std::vector<PairRecord>& records, double s) {
  NANOPLATE_THROW_IF(!(s > 0.0 && s < 1.0), ErrorCode::InvalidParameter, "s must lie in (0, 1)");
  KeyEstimate k;
  k.records = records;
  k.required_slope = 2.0 * s / (6.0 + s);
  std::vector<double> lx;
  std::vector<double> ly;
  for (const auto& r : records) {
    if (r.epsilon > 0.0 && r.weighted_misfit > 0.0) {
      lx.push_back(std::log(r.epsilon));
      ly.push_back(std::log(r.weighted_misfit));
    }
  }
  if (lx.empty()) {
    // Identical pairs only: the estimate holds trivially.
    k.pass = true;
    k.fitted_slope = std::numeric_limits<double>::infinity();
    return k;
  }
  k.log_C = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < lx.size(); ++i) k.log_C = std::max(k.log_C, ly[i] - k.required_slope * lx[i]);
  k.worst_slack = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < lx.size(); ++i)
    k.worst_slack = std::min(k.worst_slack, k.required_slope * lx[i] + k.log_C - ly[i]);
  if (lx.size() >= 2) {
    k.fitted_slope = fit_line(lx, ly).slope;
    k.pass = k.fitted_slope >= k.required_slope - 0.1;
  } else {
    k.fitted_slope = std::numeric_limits<double>::quiet_NaN();
    k.pass = false;
  }
  return k;
}

nlohmann::json StabilityReport::to_json() const {
  nlohmann::json recs = nlohmann::json::array();
  for (const auto& r : records) recs.push_back(r.to_json());
  nlohmann::json j = {
      {"config", config},
      {"records", recs},
      {"floor", floor.to_json()},
      {"levels", {{"epsilon", level_epsilon}, {"mean_error", level_error}}},
      {"fit", {{"slope", fit.slope}, {"intercept", fit.intercept}}},
      {"slope_in_range", slope_in_range},
      {"monotone", monotone},
      {"theory", {{"beta", "s/(p(6+s))"}, {"s", config.value("s", 0.0)}, {"p", "unknown"}}},
      {"key_estimate", key.to_json()},
  };
  j["uc"] = uc ? uc->to_json() : nlohmann::json(nullptr);
  return j;
}

std::uint64_t case_seed(std::uint64_t seed, double epsilon) {
  return splitmix(splitmix(seed) ^ std::bit_cast<std::uint64_t>(epsilon));
}

Deflection perturbed_measurement(const Experiment& ex, const Deflection& w1, double epsilon, std::uint64_t seed,
                                 double* noise_level) {
  const ExperimentConfig& cfg = ex.config();
  if (noise_level) *noise_level = 0.0;
  if (epsilon == 0.0) return w1;
  Measurement m = sample_field(w1, sample_grid(cfg.domain, cfg.sample_grid));
  m.sigma = cfg.sigma;
  add_noise(m, epsilon, cfg.domain.rho0, cfg.load.f_bar, case_seed(seed, epsilon));
  const Deflection fit = project_measurement(m, ex.space());
  Eigen::VectorXd delta = fit.coefficients() - w1.coefficients();
  NormConfig nc = cfg.norms;
  nc.rho0 = cfg.domain.rho0;
  const double current = l2_norm(SplineFunction(ex.space(), delta), Region::rectangle(cfg.domain.rect()), nc);
  NANOPLATE_THROW_IF(!(current > 0.0), ErrorCode::DegenerateData, "projected noise vanished");
  delta *= epsilon * cfg.domain.rho0 * cfg.load.f_bar / current;
  return Deflection(ex.space(), w1.coefficients() + delta, w1.meta());
}

SweepRecord reconstruct_case(const Experiment& ex, const ScalarField& kappa1, const Deflection& w1, double epsilon,
                             std::uint64_t seed) {
  const ExperimentConfig& cfg = ex.config();
  SweepRecord rec;
  rec.epsilon = epsilon;
  rec.seed = seed;
  rec.sigma = cfg.sigma;
  NormConfig nc = cfg.norms;
  nc.rho0 = cfg.domain.rho0;
  try {
    const Deflection wm = perturbed_measurement(ex, w1, epsilon, seed);
    rec.realized_gap =
        l2_norm(SplineFunction(ex.space(), wm.coefficients() - w1.coefficients()),
                Region::rectangle(cfg.domain.rect()), nc) /
        (cfg.domain.rho0 * cfg.load.f_bar);
    const LoadNeighborhood nb = check_load_neighborhood(w1, cfg.load);
    ReconstructionOptions ro;
    ro.sigma = cfg.sigma;
    ro.include_P0 = cfg.include_P0;
    ro.exclusion_radius = 0.5 * nb.sigma_bar_emp;
    ro.kbar = cfg.kbar;
    ro.mask_threshold = cfg.mask_threshold;
    const ReconstructionSystem sys = build_reconstruction_system(wm, cfg.load, cfg.material, ex.coef_space(), ro);
    // Noise level: residual of the projected truth on the perturbed data.
    const auto truth = project_coefficient(kappa1, ex.coef_space());
    rec.noise_level = (sys.A * truth->coefficients() - sys.r).norm();
    const AlphaChoice choice = choose_alpha(sys, cfg.alphas, rec.noise_level);
    const ReconstructionResult res = solve_reconstruction(sys, choice.alpha);
    rec.alpha = choice.alpha;
    rec.residual = res.residual;
    rec.mask_fraction = res.mask_fraction;
    const Region inner = ex.interior();
    const FunctionField diff = difference_field(*res.kappa, kappa1);
    rec.error = l2_norm(diff, inner, nc);
    const double ref = l2_norm(kappa1, inner, nc);
    rec.relative_error = ref > 0.0 ? rec.error / ref : rec.error;
  } catch (const Error& e) {
    rec.degenerate = true;
    rec.note = e.what();
  }
  return rec;
}

std::vector<PairRecord> shift_family(const Experiment& ex, const ScalarField& kappa1) {
  std::vector<PairRecord> out;
  for (double c : ex.config().shifts) {
    const FunctionField k2(
        [&kappa1, c](Point p, int order) {
          Partials d = kappa1.partials(p, order);
          d(0, 0) += c;
          return d;
        },
        kappa1.max_order());
    out.push_back(ex.run_pair(kappa1, k2));
  }
  return out;
}

StabilityReport stability_sweep(const ExperimentConfig& cfg) {
  NANOPLATE_THROW_IF(cfg.epsilons.size() < 4, ErrorCode::InvalidConfig, "a stability sweep needs at least 4 epsilon levels");
  NANOPLATE_THROW_IF(cfg.seeds.size() < 3, ErrorCode::InvalidConfig, "a stability sweep needs at least 3 seeds per level");
  const Experiment ex(cfg);
  StabilityReport report;
  report.config = cfg.to_json();

  // Admissible truth: rejection sampling for random families.
  FieldPtr kappa1;
  for (int draw = 0; draw < cfg.kappa.max_draws && !kappa1; ++draw) {
    FieldPtr k = cfg.kappa.make(cfg.domain, static_cast<std::uint64_t>(draw));
    if (ex.admissibility(*k).pass) kappa1 = k;
    if (cfg.kappa.kind != KappaFamily::Kind::BandLimited) break;
  }
  NANOPLATE_THROW_IF(!kappa1, ErrorCode::InvalidCoefficient, "no admissible foundation modulus from the configured family");
  const Deflection w1 = ex.solve(*kappa1);

  std::vector<std::uint64_t> seeds = cfg.seeds;
  std::sort(seeds.begin(), seeds.end());
  std::vector<std::pair<double, std::uint64_t>> cases;
  for (double e : cfg.epsilons)
    for (std::uint64_t s : seeds) cases.emplace_back(e, s);
  report.records.resize(cases.size());
  parallel_chunks(static_cast<int>(cases.size()), cfg.threads, [&](int begin, int end, int) {
    for (int i = begin; i < end; ++i)
      report.records[static_cast<std::size_t>(i)] = reconstruct_case(ex, *kappa1, w1, cases[i].first, cases[i].second);
  });
  report.floor = reconstruct_case(ex, *kappa1, w1, 0.0, 0);

  std::vector<double> lx;
  std::vector<double> ly;
  for (double e : cfg.epsilons) {
    double sum = 0.0;
    int n = 0;
    for (const auto& r : report.records)
      if (r.epsilon == e && !r.degenerate) {
        sum += r.error;
        ++n;
        if (r.error > 0.0) {
          lx.push_back(std::log(r.epsilon));
          ly.push_back(std::log(r.error));
        }
      }
    report.level_epsilon.push_back(e);
    report.level_error.push_back(n > 0 ? sum / n : std::numeric_limits<double>::quiet_NaN());
  }
  if (lx.size() >= 2) report.fit = fit_line(lx, ly);
  report.slope_in_range = lx.size() >= 2 && report.fit.slope > 0.0 && report.fit.slope <= 1.0;
  report.monotone = true;
  for (std::size_t i = 0; i < report.level_error.size(); ++i) {
    if (!std::isfinite(report.level_error[i])) report.monotone = false;
    if (i > 0 && !(report.level_error[i] >= 0.5 * report.level_error[i - 1])) report.monotone = false;
  }

  report.key = verify_key_estimate(shift_family(ex, *kappa1), cfg.s);

  if (cfg.run_ucp) {
    const LoadNeighborhood nb = check_load_neighborhood(w1, cfg.load);
    UCProbeConfig uc = cfg.ucp;
    uc.rho0 = cfg.domain.rho0;
    const Region U = Region::rect_minus_disc(cfg.domain.rect(), cfg.load.P0, nb.sigma_bar_emp);
    report.uc = run_uc_checks(w1, U, uc);
  }
  return report;
}

std::string sweep_plot_svg(const StabilityReport& report) {
  PlotSeries all{"cases", {}, {}, "#1f77b4", true, false};
  for (const auto& r : report.records)
    if (!r.degenerate) {
      all.x.push_back(r.epsilon);
      all.y.push_back(r.error);
    }
  PlotSeries mean{"level mean", report.level_epsilon, report.level_error, "#d62728", true, true};
  PlotSeries fit{"fit slope " + std::to_string(report.fit.slope).substr(0, 6), {}, {}, "#2ca02c", false, true};
  for (double e : report.level_epsilon) {
    fit.x.push_back(e);
    fit.y.push_back(std::exp(report.fit.intercept + report.fit.slope * std::log(e)));
  }
  return loglog_svg({all, mean, fit}, "reconstruction error vs noise level", "epsilon", "||kappa_hat - kappa||");
}

}  // namespace nanoplate
