#include "nanoplate/discretization.hpp"

#include <cmath>
#include <sstream>

#include "nanoplate/error.hpp"
#include "nanoplate/parallel.hpp"
#include "nanoplate/quadrature.hpp"

namespace nanoplate {

void PlateDomain::validate() const {
  NANOPLATE_THROW_IF(!(Lx > 0.0 && Ly > 0.0), ErrorCode::InvalidConfig, "plate side lengths must be positive");
  NANOPLATE_THROW_IF(!(rho0 > 0.0), ErrorCode::InvalidConfig, "rho0 must be positive");
  if (M1 > 0.0) {
    NANOPLATE_THROW_IF(area() > M1 * rho0 * rho0, ErrorCode::InvalidConfig, "plate area exceeds M1 rho0^2");
  }
}

SplineSpace::SplineSpace(PlateDomain domain, int degree, int spans_x, int spans_y, int clamp_layers, int quad_order)
    : domain_(domain),
      bx_(degree, spans_x, domain.Lx),
      by_(degree, spans_y, domain.Ly),
      clamp_(clamp_layers),
      quad_order_(quad_order > 0 ? quad_order : degree + 1) {
  domain_.validate();
  NANOPLATE_THROW_IF(active_x() < 1 || active_y() < 1, ErrorCode::InsufficientDofs,
                     "spline space has no active functions after removing boundary layers");
}

int SplineSpace::dof(int ix, int iy) const {
  const int ax = ix - clamp_;
  const int ay = iy - clamp_;
  if (ax < 0 || ay < 0 || ax >= active_x() || ay >= active_y()) return -1;
  return ay * active_x() + ax;
}

std::pair<int, int> SplineSpace::function_of(int dof) const {
  return {dof % active_x() + clamp_, dof / active_x() + clamp_};
}

Rect SplineSpace::support(int dof) const {
  const auto [ix, iy] = function_of(dof);
  return {bx_.support_begin(ix), by_.support_begin(iy), bx_.support_end(ix), by_.support_end(iy)};
}

LocalBasis SplineSpace::local_basis(Point p, int order) const {
  NANOPLATE_THROW_IF(!contains(p), ErrorCode::OutOfDomain, "evaluation point outside the plate");
  const int deg = degree();
  LocalBasis lb;
  lb.degree = deg;
  lb.order = order;
  const double x = std::clamp(p.x, 0.0, domain_.Lx);
  const double y = std::clamp(p.y, 0.0, domain_.Ly);
  lb.span_x = bx_.find_span(x);
  lb.span_y = by_.find_span(y);
  lb.dx.resize(static_cast<std::size_t>((order + 1) * (deg + 1)));
  lb.dy.resize(lb.dx.size());
  bx_.derivatives(lb.span_x, x, order, lb.dx.data());
  by_.derivatives(lb.span_y, y, order, lb.dy.data());
  return lb;
}

SpacePtr build_space(const PlateDomain& domain, int degree, int spans_x, int spans_y, int quad_order) {
  NANOPLATE_THROW_IF(degree < 5, ErrorCode::InvalidParameter, "clamped state space needs degree >= 5");
  NANOPLATE_THROW_IF(spans_x < 4 || spans_y < 4, ErrorCode::InsufficientDofs,
                     "clamped state space needs at least 4 spans per direction");
  NANOPLATE_THROW_IF(quad_order > 0 && quad_order < degree + 1, ErrorCode::InvalidParameter,
                     "quadrature order must be at least degree + 1");
  return std::make_shared<SplineSpace>(domain, degree, spans_x, spans_y, 3, quad_order);
}

SpacePtr build_coefficient_space(const PlateDomain& domain, int degree, int spans_x, int spans_y) {
  return std::make_shared<SplineSpace>(domain, degree, spans_x, spans_y, 0, degree + 1);
}

SplineFunction::SplineFunction(SpacePtr space, Eigen::VectorXd coefficients)
    : space_(std::move(space)), coeffs_(std::move(coefficients)) {
  NANOPLATE_THROW_IF(coeffs_.size() != space_->num_active(), ErrorCode::InvalidParameter,
                     "coefficient vector does not match the spline space");
}

double SplineFunction::value(Point p) const {
  const LocalBasis lb = space_->local_basis(p, 0);
  const int deg = lb.degree;
  double s = 0.0;
  for (int b = 0; b <= deg; ++b)
    for (int a = 0; a <= deg; ++a) {
      const int d = space_->dof(lb.span_x + a, lb.span_y + b);
      if (d >= 0) s += coeffs_[d] * lb.partial(a, b, 0, 0);
    }
  return s;
}

Partials SplineFunction::partials(Point p, int order) const {
  NANOPLATE_THROW_IF(order > Partials::kMaxOrder, ErrorCode::OrderTooHigh, "derivative order too high");
  const LocalBasis lb = space_->local_basis(p, order);
  const int deg = lb.degree;
  Partials out(order);
  for (int b = 0; b <= deg; ++b)
    for (int a = 0; a <= deg; ++a) {
      const int d = space_->dof(lb.span_x + a, lb.span_y + b);
      if (d < 0) continue;
      const double c = coeffs_[d];
      for (int total = 0; total <= order; ++total)
        for (int ny = 0; ny <= total; ++ny) out(total - ny, ny) += c * lb.partial(a, b, total - ny, ny);
    }
  return out;
}

namespace {

using Triplet = Eigen::Triplet<double>;

/// Per-span tabulation of 1D basis derivatives at the Gauss points.
struct SpanTable {
  std::vector<GaussRule> rules;          // per span
  std::vector<std::vector<double>> ders; // per span: [q][(order+1)(p+1)]
};

SpanTable tabulate(const BSplineBasis& basis, int q, int order) {
  SpanTable t;
  const int block = (order + 1) * (basis.degree() + 1);
  for (int s = 0; s < basis.spans(); ++s) {
    t.rules.push_back(gauss_legendre(q, basis.breakpoint(s), basis.breakpoint(s + 1)));
    std::vector<double> d(static_cast<std::size_t>(q * block));
    for (int i = 0; i < q; ++i) basis.derivatives(s, t.rules.back().nodes[i], order, d.data() + i * block);
    t.ders.push_back(std::move(d));
  }
  return t;
}

/// Element loop shared by the matrix assemblies. make_kernel() is called once
/// per chunk and returns kernel(point, weight, dxq, dyq, local), which adds
/// the contribution of one Gauss point into the dense element matrix.
template <class KernelFactory>
std::vector<Triplet> assemble_matrix(const SplineSpace& space, int q, int order, int threads,
                                     KernelFactory&& make_kernel) {
  const int deg = space.degree();
  const int nloc = (deg + 1) * (deg + 1);
  const SpanTable tx = tabulate(space.basis_x(), q, order);
  const SpanTable ty = tabulate(space.basis_y(), q, order);
  const int rows = space.spans_y();
  const int chunks = chunk_count(rows, threads);
  std::vector<std::vector<Triplet>> parts(static_cast<std::size_t>(chunks));
  const int block = (order + 1) * (deg + 1);

  parallel_chunks(rows, threads, [&](int begin, int end, int chunk) {
    auto& out = parts[static_cast<std::size_t>(chunk)];
    auto kernel = make_kernel();
    Eigen::MatrixXd local(nloc, nloc);
    std::vector<int> dofs(static_cast<std::size_t>(nloc));
    for (int sy = begin; sy < end; ++sy) {
      for (int sx = 0; sx < space.spans_x(); ++sx) {
        local.setZero();
        for (int j = 0; j < q; ++j)
          for (int i = 0; i < q; ++i) {
            const Point p{tx.rules[sx].nodes[i], ty.rules[sy].nodes[j]};
            const double w = tx.rules[sx].weights[i] * ty.rules[sy].weights[j];
            kernel(p, w, tx.ders[sx].data() + i * block, ty.ders[sy].data() + j * block, local);
          }
        for (int b = 0; b <= deg; ++b)
          for (int a = 0; a <= deg; ++a) dofs[b * (deg + 1) + a] = space.dof(sx + a, sy + b);
        for (int c = 0; c < nloc; ++c) {
          if (dofs[c] < 0) continue;
          for (int r = 0; r < nloc; ++r) {
            if (dofs[r] < 0) continue;
            out.emplace_back(dofs[r], dofs[c], local(r, c));
          }
        }
      }
    }
  });

  std::vector<Triplet> all;
  for (auto& part : parts) all.insert(all.end(), part.begin(), part.end());
  return all;
}

SparseMatrix to_sparse(int n, const std::vector<Triplet>& triplets) {
  SparseMatrix m(n, n);
  m.setFromTriplets(triplets.begin(), triplets.end());
  m.makeCompressed();
  return m;
}

}  // namespace

SparseMatrix assemble_stiffness(const SplineSpace& space, const MaterialParams& material,
                                const AssemblyOptions& options) {
  material.validate();
  const int deg = space.degree();
  const int nloc = (deg + 1) * (deg + 1);
  const int q = space.quad_order();

  auto blocks_at = [&](double mu, double lambda) {
    std::optional<QSplit> split;
    if (options.q8_fraction) {
      const double b1 = 0.4 * mu * material.t * material.t * material.t / 12.0 * material.l1 * material.l1;
      const double theta = *options.q8_fraction;
      split = QSplit{theta * 2.5 * b1, (1.0 - theta) * 1.25 * b1};
    }
    return constitutive_blocks(build_tensors(material, mu, lambda, split));
  };

  std::optional<ConstitutiveBlocks> homogeneous;
  if (material.is_homogeneous()) {
    material.check_point({0.0, 0.0});
    homogeneous = blocks_at(material.mu->value({}), material.lambda->value({}));
  }

  auto make_kernel = [&] {
    return [&, h = std::vector<double>(static_cast<std::size_t>(3 * nloc)),
            g = std::vector<double>(static_cast<std::size_t>(4 * nloc))](
               Point p, double w, const double* dx, const double* dy, Eigen::MatrixXd& local) mutable {
    ConstitutiveBlocks blocks;
    if (homogeneous) {
      blocks = *homogeneous;
    } else {
      material.check_point(p);
      blocks = blocks_at(material.mu->value(p), material.lambda->value(p));
    }
    const int n1 = deg + 1;
    auto X = [&](int k, int a) { return dx[k * n1 + a]; };
    auto Y = [&](int k, int b) { return dy[k * n1 + b]; };
    for (int b = 0; b <= deg; ++b)
      for (int a = 0; a <= deg; ++a) {
        const int r = b * n1 + a;
        h[3 * r + 0] = X(2, a) * Y(0, b);
        h[3 * r + 1] = X(1, a) * Y(1, b);
        h[3 * r + 2] = X(0, a) * Y(2, b);
        g[4 * r + 0] = X(3, a) * Y(0, b);
        g[4 * r + 1] = X(2, a) * Y(1, b);
        g[4 * r + 2] = X(1, a) * Y(2, b);
        g[4 * r + 3] = X(0, a) * Y(3, b);
      }
    const Eigen::Matrix3d C = w * blocks.curvature;
    const Eigen::Matrix4d D = w * blocks.gradient;
    for (int c = 0; c < nloc; ++c) {
      const Eigen::Vector3d hc(h[3 * c], h[3 * c + 1], h[3 * c + 2]);
      const Eigen::Vector4d gc(g[4 * c], g[4 * c + 1], g[4 * c + 2], g[4 * c + 3]);
      const Eigen::Vector3d Ch = C * hc;
      const Eigen::Vector4d Dg = D * gc;
      for (int r = 0; r < nloc; ++r) {
        local(r, c) += h[3 * r] * Ch[0] + h[3 * r + 1] * Ch[1] + h[3 * r + 2] * Ch[2] + g[4 * r] * Dg[0] +
                       g[4 * r + 1] * Dg[1] + g[4 * r + 2] * Dg[2] + g[4 * r + 3] * Dg[3];
      }
    }
    };
  };
  return to_sparse(space.num_active(), assemble_matrix(space, q, 3, options.threads, make_kernel));
}

SparseMatrix assemble_kappa_mass(const SplineSpace& space, const ScalarField& kappa, int quad_order, int threads) {
  const int deg = space.degree();
  const int nloc = (deg + 1) * (deg + 1);
  const int q = quad_order > 0 ? quad_order : space.quad_order();
  auto make_kernel = [&] {
    return [&, phi = std::vector<double>(static_cast<std::size_t>(nloc))](
               Point p, double w, const double* dx, const double* dy, Eigen::MatrixXd& local) mutable {
      const double k = kappa.value(p);
      if (!(k >= 0.0)) {
        std::ostringstream os;
        os << "foundation modulus is negative (" << k << ") at (" << p.x << ", " << p.y << ")";
        throw Error(ErrorCode::InvalidCoefficient, os.str());
      }
      if (k == 0.0) return;
      for (int b = 0; b <= deg; ++b)
        for (int a = 0; a <= deg; ++a) phi[b * (deg + 1) + a] = dx[a] * dy[b];
      const double wk = w * k;
      for (int c = 0; c < nloc; ++c) {
        const double pc = wk * phi[c];
        for (int r = 0; r < nloc; ++r) local(r, c) += phi[r] * pc;
      }
    };
  };
  return to_sparse(space.num_active(), assemble_matrix(space, q, 0, threads, make_kernel));
}

Eigen::VectorXd point_load_vector(const SplineSpace& space, Point P0, double f, double d) {
  const PlateDomain& dom = space.domain();
  NANOPLATE_THROW_IF(!dom.rect().contains(P0), ErrorCode::LoadPlacement, "load point outside the plate");
  const double dist = dom.rect().boundary_distance(P0);
  if (dist < d * dom.rho0) {
    std::ostringstream os;
    os << "load point is " << dist << " from the boundary, closer than d rho0 = " << d * dom.rho0;
    throw Error(ErrorCode::LoadPlacement, os.str());
  }
  Eigen::VectorXd F = Eigen::VectorXd::Zero(space.num_active());
  const LocalBasis lb = space.local_basis(P0, 0);
  for (int b = 0; b <= lb.degree; ++b)
    for (int a = 0; a <= lb.degree; ++a) {
      const int k = space.dof(lb.span_x + a, lb.span_y + b);
      if (k >= 0) F[k] += f * lb.partial(a, b, 0, 0);
    }
  return F;
}

Eigen::VectorXd load_vector(const SplineSpace& space, const ScalarField& g) {
  Eigen::VectorXd F = Eigen::VectorXd::Zero(space.num_active());
  for_each_quadrature_point(space, 0, [&](Point p, double w) {
    const double gv = g.value(p);
    const LocalBasis lb = space.local_basis(p, 0);
    for (int b = 0; b <= lb.degree; ++b)
      for (int a = 0; a <= lb.degree; ++a) {
        const int k = space.dof(lb.span_x + a, lb.span_y + b);
        if (k >= 0) F[k] += w * gv * lb.partial(a, b, 0, 0);
      }
  });
  return F;
}

namespace {

/// Refinement matrix R with coarse N_a = sum_i R(i, a) fine N_i, obtained by
/// collocation at the fine Greville abscissae.
Eigen::MatrixXd refinement_1d(const BSplineBasis& coarse, const BSplineBasis& fine) {
  const int nf = fine.size();
  const int nc = coarse.size();
  const int p = fine.degree();
  Eigen::MatrixXd Cf = Eigen::MatrixXd::Zero(nf, nf);
  Eigen::MatrixXd Bc = Eigen::MatrixXd::Zero(nf, nc);
  std::vector<double> buf(static_cast<std::size_t>(p + 1));
  for (int i = 0; i < nf; ++i) {
    const double x = fine.greville(i);
    const int sf = fine.find_span(x);
    fine.derivatives(sf, x, 0, buf.data());
    for (int a = 0; a <= p; ++a) Cf(i, sf + a) = buf[a];
    const int sc = coarse.find_span(x);
    coarse.derivatives(sc, x, 0, buf.data());
    for (int a = 0; a <= p; ++a) Bc(i, sc + a) = buf[a];
  }
  return Cf.partialPivLu().solve(Bc);
}

}  // namespace

Eigen::VectorXd prolongate(const SplineSpace& coarse, const SplineSpace& fine, const Eigen::VectorXd& coarse_coeffs) {
  NANOPLATE_THROW_IF(coarse.degree() != fine.degree(), ErrorCode::InvalidParameter,
                     "prolongation requires equal degrees");
  NANOPLATE_THROW_IF(fine.spans_x() % coarse.spans_x() != 0 || fine.spans_y() % coarse.spans_y() != 0,
                     ErrorCode::InvalidParameter, "fine spans must be multiples of coarse spans");
  NANOPLATE_THROW_IF(coarse.domain().Lx != fine.domain().Lx || coarse.domain().Ly != fine.domain().Ly,
                     ErrorCode::InvalidParameter, "prolongation requires the same plate");
  const Eigen::MatrixXd Rx = refinement_1d(coarse.basis_x(), fine.basis_x());
  const Eigen::MatrixXd Ry = refinement_1d(coarse.basis_y(), fine.basis_y());
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(coarse.basis_x().size(), coarse.basis_y().size());
  for (int k = 0; k < coarse.num_active(); ++k) {
    const auto [ix, iy] = coarse.function_of(k);
    C(ix, iy) = coarse_coeffs[k];
  }
  const Eigen::MatrixXd Fm = Rx * C * Ry.transpose();
  Eigen::VectorXd out(fine.num_active());
  for (int k = 0; k < fine.num_active(); ++k) {
    const auto [ix, iy] = fine.function_of(k);
    out[k] = Fm(ix, iy);
  }
  return out;
}

}  // namespace nanoplate
