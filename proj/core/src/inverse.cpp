#include "nanoplate/inverse.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "nanoplate/error.hpp"
#include "nanoplate/parallel.hpp"

namespace nanoplate {

std::vector<Point> sample_grid(const PlateDomain& domain, int n) {
  NANOPLATE_THROW_IF(n < 2, ErrorCode::InvalidParameter, "sample grid needs at least 2 nodes per side");
  std::vector<Point> pts;
  pts.reserve(static_cast<std::size_t>(n * n));
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) pts.push_back({domain.Lx * i / (n - 1), domain.Ly * j / (n - 1)});
  return pts;
}

Measurement sample_field(const ScalarField& w, std::vector<Point> points) {
  Measurement m;
  m.values.reserve(points.size());
  for (const Point& p : points) m.values.push_back(w.value(p));
  m.points = std::move(points);
  return m;
}

void add_noise(Measurement& m, double epsilon, double rho0, double f_bar, std::uint64_t seed) {
  NANOPLATE_THROW_IF(epsilon < 0.0, ErrorCode::InvalidParameter, "noise level must be nonnegative");
  m.epsilon = epsilon;
  m.noise_std = epsilon * rho0 * f_bar;
  m.seed = seed;
  if (m.noise_std == 0.0) return;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, m.noise_std);
  for (double& v : m.values) v += normal(rng);
}

namespace {

/// Dense collocation matrix of the active basis at the sample points.
Eigen::MatrixXd collocation(const SplineSpace& space, const std::vector<Point>& pts) {
  Eigen::MatrixXd Phi = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(pts.size()), space.num_active());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const LocalBasis lb = space.local_basis(pts[i], 0);
    for (int b = 0; b <= lb.degree; ++b)
      for (int a = 0; a <= lb.degree; ++a) {
        const int k = space.dof(lb.span_x + a, lb.span_y + b);
        if (k >= 0) Phi(static_cast<Eigen::Index>(i), k) += lb.partial(a, b, 0, 0);
      }
  }
  return Phi;
}

/// Gram matrix of int grad^3 u . grad^3 v.
Eigen::MatrixXd third_gradient_gram(const SplineSpace& space) {
  const int n = space.num_active();
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(n, n);
  const int deg = space.degree();
  const int nloc = (deg + 1) * (deg + 1);
  std::vector<int> dofs(static_cast<std::size_t>(nloc));
  Eigen::MatrixXd g(4, nloc);
  const double mult[4] = {1.0, 3.0, 3.0, 1.0};
  for_each_quadrature_point(space, 0, [&](Point p, double w) {
    const LocalBasis lb = space.local_basis(p, 3);
    for (int b = 0; b <= deg; ++b)
      for (int a = 0; a <= deg; ++a) {
        const int r = b * (deg + 1) + a;
        dofs[r] = space.dof(lb.span_x + a, lb.span_y + b);
        for (int c = 0; c < 4; ++c) g(c, r) = lb.partial(a, b, 3 - c, c);
      }
    for (int r = 0; r < nloc; ++r) {
      if (dofs[r] < 0) continue;
      for (int c = 0; c < nloc; ++c) {
        if (dofs[c] < 0) continue;
        double v = 0.0;
        for (int k = 0; k < 4; ++k) v += mult[k] * g(k, r) * g(k, c);
        G(dofs[r], dofs[c]) += w * v;
      }
    }
  });
  return G;
}

}  // namespace

Deflection project_measurement(const Measurement& m, SpacePtr space, const ProjectionOptions& options,
                               ProjectionReport* report) {
  const int n = space->num_active();
  const auto N = static_cast<Eigen::Index>(m.size());
  NANOPLATE_THROW_IF(m.values.size() != m.points.size(), ErrorCode::InvalidParameter,
                     "measurement has mismatched points and values");
  NANOPLATE_THROW_IF(N < n, ErrorCode::InsufficientSamples,
                     "projection needs at least as many samples (" + std::to_string(N) + ") as active functions (" +
                         std::to_string(n) + ")");
  const Eigen::MatrixXd Phi = collocation(*space, m.points);
  const Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(m.values.data(), N);

  const bool smooth = options.smoothing > 0.0 || (options.smoothing < 0.0 && m.noise_std > 0.0);
  Eigen::VectorXd c;
  double lambda_rel = 0.0;
  if (!smooth) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Phi);
    NANOPLATE_THROW_IF(qr.rank() < n, ErrorCode::InsufficientSamples,
                       "samples do not determine the spline fit (rank " + std::to_string(qr.rank()) + " < " +
                           std::to_string(n) + ")");
    c = qr.solve(y);
  } else {
    const Eigen::MatrixXd H = Phi.transpose() * Phi;
    const Eigen::VectorXd b = Phi.transpose() * y;
    const Eigen::MatrixXd G = third_gradient_gram(*space);
    // G v = mu H v with V^T H V = I diagonalizes every (H + lambda G).
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(G, H);
    NANOPLATE_THROW_IF(ges.info() != Eigen::Success || !(ges.eigenvalues().array() > -1e-12).all(),
                       ErrorCode::InsufficientSamples, "sample normal matrix is singular");
    const Eigen::MatrixXd& V = ges.eigenvectors();
    const Eigen::VectorXd mu = ges.eigenvalues().cwiseMax(0.0);
    const Eigen::VectorXd Vb = V.transpose() * b;
    const double scale = H.trace() / G.trace();
    const double yy = y.squaredNorm();
    auto coeffs = [&](double lam) {
      const Eigen::VectorXd z = Vb.array() / (1.0 + lam * scale * mu.array());
      return Eigen::VectorXd(V * z);
    };
    auto residual_sq = [&](double lam) {
      const Eigen::VectorXd z = Vb.array() / (1.0 + lam * scale * mu.array());
      // ||Phi c - y||^2 = y.y - 2 c.b + c^T H c with c = V z and V^T H V = I.
      return std::max(0.0, yy - 2.0 * z.dot(Vb) + z.squaredNorm());
    };
    if (options.smoothing > 0.0) {
      lambda_rel = options.smoothing;
    } else {
      const double target = static_cast<double>(N) * m.noise_std * m.noise_std;
      double lo = -16.0;
      double hi = 2.0;
      if (residual_sq(std::pow(10.0, lo)) >= target) {
        lambda_rel = std::pow(10.0, lo);
      } else if (residual_sq(std::pow(10.0, hi)) <= target) {
        lambda_rel = std::pow(10.0, hi);
      } else {
        for (int it = 0; it < 60; ++it) {
          const double mid = 0.5 * (lo + hi);
          (residual_sq(std::pow(10.0, mid)) <= target ? lo : hi) = mid;
        }
        lambda_rel = std::pow(10.0, lo);
      }
    }
    c = coeffs(lambda_rel);
  }
  if (report) {
    report->smoothing = lambda_rel;
    report->rms_residual = std::sqrt((Phi * c - y).squaredNorm() / static_cast<double>(N));
  }
  return Deflection(std::move(space), std::move(c), {"measurement", "", 0.0, {}});
}

SpacePtr coefficient_space_for(const SplineSpace& state, int coarsening) {
  NANOPLATE_THROW_IF(coarsening < 1 || state.spans_x() % coarsening != 0 || state.spans_y() % coarsening != 0,
                     ErrorCode::InvalidParameter, "state spans must be divisible by the coefficient coarsening");
  return build_coefficient_space(state.domain(), 2, state.spans_x() / coarsening, state.spans_y() / coarsening);
}

std::shared_ptr<const SplineFunction> project_coefficient(const ScalarField& kappa, SpacePtr coef_space) {
  const int n = coef_space->num_active();
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  const int deg = coef_space->degree();
  for_each_quadrature_point(*coef_space, deg + 3, [&](Point p, double w) {
    const LocalBasis lb = coef_space->local_basis(p, 0);
    const double k = kappa.value(p);
    for (int bb = 0; bb <= deg; ++bb)
      for (int a = 0; a <= deg; ++a) {
        const int r = coef_space->dof(lb.span_x + a, lb.span_y + bb);
        const double pr = lb.partial(a, bb, 0, 0);
        b[r] += w * k * pr;
        for (int d = 0; d <= deg; ++d)
          for (int c = 0; c <= deg; ++c)
            M(r, coef_space->dof(lb.span_x + c, lb.span_y + d)) += w * pr * lb.partial(c, d, 0, 0);
      }
  });
  return std::make_shared<SplineFunction>(std::move(coef_space), M.llt().solve(b));
}

ReconstructionSystem build_reconstruction_system(const SplineFunction& w_meas, const LoadCase& load,
                                                 const MaterialParams& material, SpacePtr coef_space,
                                                 const ReconstructionOptions& options) {
  const SplineSpace& space = w_meas.space();
  const PlateDomain& dom = space.domain();
  NANOPLATE_THROW_IF(options.sigma < 0.0, ErrorCode::InvalidParameter, "interior margin must be nonnegative");
  const double margin = options.sigma * dom.rho0;
  const Rect interior{margin, margin, dom.Lx - margin, dom.Ly - margin};
  NANOPLATE_THROW_IF(interior.empty(), ErrorCode::EmptyRegion, "interior region of margin sigma rho0 is empty");

  ReconstructionSystem sys;
  sys.coef_space = std::move(coef_space);
  sys.sigma = options.sigma;
  sys.rho0 = dom.rho0;
  sys.kbar = options.kbar;

  const double tol = 1e-12 * std::max(dom.Lx, dom.Ly);
  std::vector<int> test_index(static_cast<std::size_t>(space.num_active()), -1);
  for (int j = 0; j < space.num_active(); ++j) {
    const Rect s = space.support(j);
    if (s.x0 < interior.x0 - tol || s.y0 < interior.y0 - tol || s.x1 > interior.x1 + tol || s.y1 > interior.y1 + tol)
      continue;
    if (!options.include_P0) {
      const double nx = std::clamp(load.P0.x, s.x0, s.x1);
      const double ny = std::clamp(load.P0.y, s.y0, s.y1);
      if (distance(load.P0, {nx, ny}) <= options.exclusion_radius) continue;
    }
    test_index[j] = static_cast<int>(sys.tests.size());
    sys.tests.push_back(j);
  }
  NANOPLATE_THROW_IF(sys.tests.empty(), ErrorCode::DegenerateData,
                     "no test functions are supported in the interior region away from the load");

  const auto nt = static_cast<Eigen::Index>(sys.tests.size());
  const int nk = sys.coef_space->num_active();
  sys.A = Eigen::MatrixXd::Zero(nt, nk);

  // r = F - K w on the test rows.
  const SparseMatrix K = assemble_stiffness(space, material, {std::nullopt, options.threads});
  const Eigen::VectorXd Kw = K * w_meas.coefficients();
  Eigen::VectorXd F = Eigen::VectorXd::Zero(space.num_active());
  if (options.include_P0) F = point_load_vector(space, load.P0, load.f(dom.rho0), load.d);
  sys.r.resize(nt);
  for (Eigen::Index t = 0; t < nt; ++t) sys.r[t] = F[sys.tests[t]] - Kw[sys.tests[t]];

  // A uses the state quadrature so that A c reproduces M(kappa) w exactly.
  const int deg = space.degree();
  const SplineSpace& cs = *sys.coef_space;
  const int cdeg = cs.degree();
  double max_w = 0.0;
  std::vector<double> interior_w;
  for_each_quadrature_point(space, 0, [&](Point p, double wq) {
    const LocalBasis lb = space.local_basis(p, 0);
    double wv = 0.0;
    for (int b = 0; b <= deg; ++b)
      for (int a = 0; a <= deg; ++a) {
        const int k = space.dof(lb.span_x + a, lb.span_y + b);
        if (k >= 0) wv += w_meas.coefficients()[k] * lb.partial(a, b, 0, 0);
      }
    max_w = std::max(max_w, std::abs(wv));
    if (interior.contains(p)) interior_w.push_back(std::abs(wv));
    const LocalBasis cb = cs.local_basis(p, 0);
    for (int b = 0; b <= deg; ++b)
      for (int a = 0; a <= deg; ++a) {
        const int j = space.dof(lb.span_x + a, lb.span_y + b);
        if (j < 0 || test_index[j] < 0) continue;
        const double v = wq * wv * lb.partial(a, b, 0, 0);
        for (int d = 0; d <= cdeg; ++d)
          for (int c = 0; c <= cdeg; ++c)
            sys.A(test_index[j], cs.dof(cb.span_x + c, cb.span_y + d)) += v * cb.partial(c, d, 0, 0);
      }
  });
  std::size_t masked = 0;
  for (double v : interior_w) masked += v < options.mask_threshold * max_w ? 1 : 0;
  sys.mask_fraction = interior_w.empty() ? 1.0 : static_cast<double>(masked) / static_cast<double>(interior_w.size());
  NANOPLATE_THROW_IF(!(max_w > 0.0) || sys.mask_fraction >= 1.0 || sys.A.norm() == 0.0, ErrorCode::DegenerateData,
                     "measured deflection is negligible on the whole interior region");
  return sys;
}

ReconstructionResult solve_reconstruction(const ReconstructionSystem& sys, double alpha) {
  NANOPLATE_THROW_IF(!(alpha > 0.0), ErrorCode::InvalidParameter, "regularization weight alpha must be positive");
  const Eigen::Index nt = sys.A.rows();
  const Eigen::Index nk = sys.A.cols();
  const double scaled = alpha * sys.A.squaredNorm() / static_cast<double>(nk);
  Eigen::MatrixXd aug(nt + nk, nk);
  aug << sys.A, std::sqrt(scaled) * Eigen::MatrixXd::Identity(nk, nk);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nt + nk);
  rhs.head(nt) = sys.r;
  const Eigen::VectorXd c = aug.colPivHouseholderQr().solve(rhs);
  NANOPLATE_THROW_IF(!c.allFinite(), ErrorCode::NumericFailure, "reconstruction least-squares solve failed");

  ReconstructionResult res;
  res.unclipped = c;
  res.alpha = alpha;
  res.sigma = sys.sigma;
  res.mask_fraction = sys.mask_fraction;
  res.tests = static_cast<int>(nt);
  const double hi = sys.kbar / sys.rho0;
  Eigen::VectorXd clipped = c;
  for (Eigen::Index k = 0; k < nk; ++k) {
    const double v = std::clamp(c[k], 0.0, hi);
    if (v != c[k]) ++res.clipped;
    clipped[k] = v;
  }
  res.unclipped_residual = (sys.A * c - sys.r).norm();
  res.residual = (sys.A * clipped - sys.r).norm();
  res.kappa = std::make_shared<SplineFunction>(sys.coef_space, std::move(clipped));
  return res;
}

ReconstructionResult reconstruct_kappa(const SplineFunction& w_meas, const LoadCase& load,
                                       const MaterialParams& material, SpacePtr coef_space, double alpha,
                                       const ReconstructionOptions& options) {
  NANOPLATE_THROW_IF(!(alpha > 0.0), ErrorCode::InvalidParameter, "regularization weight alpha must be positive");
  return solve_reconstruction(build_reconstruction_system(w_meas, load, material, std::move(coef_space), options),
                              alpha);
}

double weak_form_residual(const SplineFunction& w_meas, const LoadCase& load, const MaterialParams& material,
                          const ScalarField& kappa, const std::vector<int>& tests) {
  const SplineSpace& space = w_meas.space();
  const SparseMatrix K = assemble_stiffness(space, material);
  const SparseMatrix M = assemble_kappa_mass(space, kappa);
  const Eigen::VectorXd R = K * w_meas.coefficients() + M * w_meas.coefficients();
  // Test functions near P0 are excluded unless f v(P0) is kept; subtracting
  // the load is harmless for the excluded ones since v(P0) = 0 there.
  const Eigen::VectorXd F = point_load_vector(space, load.P0, load.f(space.domain().rho0), 0.0);
  double s = 0.0;
  for (int j : tests) {
    const double v = R[j] - F[j];
    s += v * v;
  }
  return std::sqrt(s);
}

AlphaChoice choose_alpha(const ReconstructionSystem& sys, std::vector<double> alphas, double noise_level) {
  NANOPLATE_THROW_IF(alphas.empty(), ErrorCode::InvalidParameter, "alpha sweep is empty");
  std::sort(alphas.begin(), alphas.end());
  AlphaChoice out;
  for (double a : alphas) out.residuals.push_back(solve_reconstruction(sys, a).unclipped_residual);
  for (std::size_t i = 1; i < out.residuals.size(); ++i)
    if (out.residuals[i] < out.residuals[i - 1] * (1.0 - 1e-9)) out.monotone = false;
  bool found = false;
  double best = 0.0;
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    const double gap = out.residuals[i] - noise_level;
    if (gap >= 0.0 && (!found || gap < best)) {
      best = gap;
      out.index = i;
      found = true;
    }
  }
  if (!found) out.index = alphas.size() - 1;
  out.alpha = alphas[out.index];
  return out;
}

nlohmann::json ReconstructionResult::to_json() const {
  return {{"alpha", alpha},
          {"residual", residual},
          {"unclipped_residual", unclipped_residual},
          {"sigma", sigma},
          {"mask_fraction", mask_fraction},
          {"clipped", clipped},
          {"tests", tests},
          {"coefficients", std::vector<double>(kappa->coefficients().data(),
                                               kappa->coefficients().data() + kappa->coefficients().size())}};
}

void write_measurement_csv(const Measurement& m, const std::string& path) {
  std::ofstream os(path);
  NANOPLATE_THROW_IF(!os, ErrorCode::Io, "cannot write '" + path + "'");
  os << std::setprecision(17) << "x,y,w\n";
  for (std::size_t i = 0; i < m.size(); ++i) os << m.points[i].x << ',' << m.points[i].y << ',' << m.values[i] << '\n';
  std::ofstream meta(path + ".json");
  NANOPLATE_THROW_IF(!meta, ErrorCode::Io, "cannot write '" + path + ".json'");
  meta << nlohmann::json{{"epsilon", m.epsilon}, {"noise_std", m.noise_std}, {"seed", m.seed}, {"sigma", m.sigma}}
              .dump(2)
       << '\n';
}

Measurement read_measurement_csv(const std::string& path) {
  std::ifstream is(path);
  NANOPLATE_THROW_IF(!is, ErrorCode::Io, "cannot open '" + path + "'");
  Measurement m;
  std::string line;
  std::getline(is, line);
  NANOPLATE_THROW_IF(line.rfind("x,y,w", 0) != 0, ErrorCode::Io, "'" + path + "' lacks the x,y,w header");
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    double x = 0, y = 0, w = 0;
    NANOPLATE_THROW_IF(!(ls >> x >> y >> w), ErrorCode::Io, "malformed measurement row '" + line + "'");
    m.points.push_back({x, y});
    m.values.push_back(w);
  }
  std::ifstream meta(path + ".json");
  if (meta) {
    try {
      const auto j = nlohmann::json::parse(meta);
      m.epsilon = j.value("epsilon", 0.0);
      m.noise_std = j.value("noise_std", 0.0);
      m.seed = j.value("seed", std::uint64_t{0});
      m.sigma = j.value("sigma", 0.0);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::Io, std::string("malformed measurement metadata: ") + e.what());
    }
  }
  return m;
}

void write_field_grid_csv(const ScalarField& f, const PlateDomain& domain, int n, const std::string& path) {
  std::ofstream os(path);
  NANOPLATE_THROW_IF(!os, ErrorCode::Io, "cannot write '" + path + "'");
  os << std::setprecision(17) << "x,y,value\n";
  for (const Point& p : sample_grid(domain, n)) os << p.x << ',' << p.y << ',' << f.value(p) << '\n';
}

}  // namespace nanoplate
