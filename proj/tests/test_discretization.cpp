#include <gtest/gtest.h>

#include <random>

#include "nanoplate/discretization.hpp"
#include "nanoplate/error.hpp"
#include "nanoplate/norms.hpp"
#include "nanoplate/quadrature.hpp"
#include "nanoplate/solver.hpp"
#include "support.hpp"

namespace nanoplate {
namespace {

const PlateDomain kUnit{};

Eigen::VectorXd random_coefficients(const SplineSpace& s, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n;
  Eigen::VectorXd c(s.num_active());
  for (Eigen::Index i = 0; i < c.size(); ++i) c[i] = n(rng);
  return c;
}

TEST(Quadrature, GaussLegendreIsExactToDegree2nMinus1) {
  for (int n = 1; n <= 12; ++n) {
    const GaussRule g = gauss_legendre(n, 0.0, 2.0);
    for (int k = 0; k <= 2 * n - 1; ++k) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += g.weights[i] * std::pow(g.nodes[i], k);
      EXPECT_NEAR(s, std::pow(2.0, k + 1) / (k + 1), 1e-12 * std::pow(2.0, k + 1)) << "n=" << n << " k=" << k;
    }
  }
}

TEST(BSpline, PartitionOfUnityAndFiniteDifferenceDerivatives) {
  const BSplineBasis b(5, 7, 2.0);
  const double h = 1e-5;
  std::vector<double> d(4 * 6), dp(6), dm(6);
  for (double x : {0.013, 0.31, 0.9999, 1.2857, 1.77}) {
    const int s = b.find_span(x);
    b.derivatives(s, x, 3, d.data());
    double sum = 0.0;
    for (int a = 0; a <= 5; ++a) sum += d[a];
    EXPECT_NEAR(sum, 1.0, 1e-14);
    for (int k = 1; k <= 3; ++k) {
      std::vector<double> lo(4 * 6), hi(4 * 6);
      b.derivatives(s, x - h, 3, lo.data());
      b.derivatives(s, x + h, 3, hi.data());
      for (int a = 0; a <= 5; ++a) {
        const double fd = (hi[(k - 1) * 6 + a] - lo[(k - 1) * 6 + a]) / (2 * h);
        EXPECT_NEAR(d[k * 6 + a], fd, 1e-5 * (1.0 + std::fabs(fd))) << "k=" << k;
      }
    }
  }
}

TEST(Space, ActiveDofCounts) {
  EXPECT_EQ(build_space(kUnit, 5, 8, 8)->num_active(), 49);
  EXPECT_EQ(build_space(kUnit, 5, 4, 6)->num_active(), 3 * 5);
  try {
    (void)build_space(kUnit, 5, 1, 1);
    FAIL() << "expected InsufficientDofs";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InsufficientDofs);
  }
  EXPECT_THROW((void)build_space(kUnit, 4, 8, 8), Error);
}

TEST(Space, ActiveFunctionsSatisfyClampedTrace) {
  const SpacePtr s = build_space(kUnit, 5, 6, 6);
  const SplineFunction w(s, random_coefficients(*s, 3));
  for (double t : {0.1, 0.37, 0.5, 0.83}) {
    for (Point p : {Point{0.0, t}, Point{1.0, t}, Point{t, 0.0}, Point{t, 1.0}}) {
      const Partials d = w.partials(p, 2);
      EXPECT_NEAR(d(0, 0), 0.0, 1e-12);
      EXPECT_NEAR(d(1, 0), 0.0, 1e-11);
      EXPECT_NEAR(d(0, 1), 0.0, 1e-11);
      EXPECT_NEAR(d(2, 0), 0.0, 1e-10);
      EXPECT_NEAR(d(0, 2), 0.0, 1e-10);
    }
  }
}

TEST(Space, SplinePartialsMatchFiniteDifferences) {
  const SpacePtr s = build_space(kUnit, 5, 5, 7);
  const SplineFunction w(s, random_coefficients(*s, 4));
  const double h = 1e-5;
  const Point p{0.41, 0.57};
  const Partials d = w.partials(p, 3);
  const Partials px = w.partials({p.x + h, p.y}, 2), mx = w.partials({p.x - h, p.y}, 2);
  const Partials py = w.partials({p.x, p.y + h}, 2), my = w.partials({p.x, p.y - h}, 2);
  for (int t = 0; t <= 2; ++t)
    for (int ny = 0; ny <= t; ++ny) {
      const int nx = t - ny;
      const double fdx = (px(nx, ny) - mx(nx, ny)) / (2 * h);
      const double fdy = (py(nx, ny) - my(nx, ny)) / (2 * h);
      EXPECT_NEAR(d(nx + 1, ny), fdx, 1e-4 * (1 + std::fabs(fdx)));
      EXPECT_NEAR(d(nx, ny + 1), fdy, 1e-4 * (1 + std::fabs(fdy)));
    }
}

// Independent energy: D (lap w)^2 + G |grad lap w|^2 integrated with a finer
// tensor Gauss rule, valid for clamped w and constant material.
TEST(Assembly, StiffnessEnergyMatchesReducedForm) {
  const MaterialParams m = testing::material();
  const testing::PlateConstants pc = testing::plate_constants(m);
  const SpacePtr s = build_space(kUnit, 5, 6, 6);
  const SparseMatrix K = assemble_stiffness(*s, m);
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const Eigen::VectorXd c = random_coefficients(*s, seed);
    const SplineFunction w(s, c);
    double want = 0.0;
    for_each_quadrature_point(*s, 9, [&](Point p, double wt) {
      const Partials d = w.partials(p, 3);
      const double lap = d(2, 0) + d(0, 2);
      const double gx = d(3, 0) + d(1, 2), gy = d(2, 1) + d(0, 3);
      want += wt * (pc.D * lap * lap + pc.G * (gx * gx + gy * gy));
    });
    EXPECT_LE(testing::relative(c.dot(K * c), want), 1e-10);
  }
}

TEST(Assembly, StiffnessIsSymmetricPositiveDefinite) {
  const SpacePtr s = build_space(kUnit, 5, 5, 5);
  const Eigen::MatrixXd K = Eigen::MatrixXd(assemble_stiffness(*s, testing::material()));
  EXPECT_LE((K - K.transpose()).norm(), 1e-14 * K.norm());
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(K);
  EXPECT_GT(es.eigenvalues()(0), 0.0);
}

TEST(Assembly, KappaMassMatchesWeightedL2) {
  const SpacePtr s = build_space(kUnit, 5, 6, 6);
  const FieldPtr kappa = testing::value_field([](Point p) { return 1.0 + p.x * p.y; });
  const SparseMatrix M = assemble_kappa_mass(*s, *kappa, 10);
  const Eigen::VectorXd c = random_coefficients(*s, 5);
  const SplineFunction w(s, c);
  double want = 0.0;
  for_each_quadrature_point(*s, 10, [&](Point p, double wt) {
    const double v = w.value(p);
    want += wt * (1.0 + p.x * p.y) * v * v;
  });
  EXPECT_LE(testing::relative(c.dot(M * c), want), 1e-12);
}

TEST(Assembly, ParallelAssemblyIsReproducible) {
  const SpacePtr s = build_space(kUnit, 5, 8, 8);
  const MaterialParams m = testing::material();
  const SparseMatrix a = assemble_stiffness(*s, m);
  const SparseMatrix b = assemble_stiffness(*s, m);
  AssemblyOptions opt;
  opt.threads = 4;
  const SparseMatrix c = assemble_stiffness(*s, m, opt);
  EXPECT_EQ(Eigen::MatrixXd(a), Eigen::MatrixXd(b));
  EXPECT_EQ(Eigen::MatrixXd(a), Eigen::MatrixXd(c));
}

TEST(Assembly, LoadVectors) {
  const SpacePtr s = build_space(kUnit, 5, 6, 6);
  const Eigen::VectorXd c = random_coefficients(*s, 6);
  const SplineFunction w(s, c);
  const Eigen::VectorXd F = load_vector(*s, *testing::value_field([](Point) { return 1.0; }));
  double integral = 0.0;
  for_each_quadrature_point(*s, 8, [&](Point p, double wt) { integral += wt * w.value(p); });
  EXPECT_NEAR(c.dot(F), integral, 1e-12 * std::fabs(integral) + 1e-15);

  const Point P0{0.43, 0.61};
  const Eigen::VectorXd Fp = point_load_vector(*s, P0, 2.5, 0.2);
  EXPECT_NEAR(c.dot(Fp), 2.5 * w.value(P0), 1e-12);
  EXPECT_THROW((void)point_load_vector(*s, {0.05, 0.5}, 1.0, 0.2), Error);
}

TEST(Assembly, ProlongationPreservesTheFunction) {
  const SpacePtr coarse = build_space(kUnit, 5, 6, 6);
  const SpacePtr fine = build_space(kUnit, 5, 12, 12);
  const Eigen::VectorXd c = random_coefficients(*coarse, 9);
  const SplineFunction wc(coarse, c);
  const SplineFunction wf(fine, prolongate(*coarse, *fine, c));
  for (Point p : {Point{0.2, 0.3}, Point{0.51, 0.77}, Point{0.93, 0.12}})
    EXPECT_NEAR(wf.value(p), wc.value(p), 1e-12);
}

TEST(Assembly, ManufacturedSolutionConvergesAtHighOrder) {
  const double e16 = testing::mms_error(16);
  const double e32 = testing::mms_error(32);
  const double order = std::log2(e16 / e32);
  EXPECT_GE(order, 3.0) << "e16=" << e16 << " e32=" << e32;
}

}  // namespace
}  // namespace nanoplate
