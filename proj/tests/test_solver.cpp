#include <gtest/gtest.h>

#include <limits>

#include "nanoplate/error.hpp"
#include "nanoplate/solver.hpp"
#include "support.hpp"

namespace nanoplate {
namespace {

const PlateDomain kUnit{};

struct Fixture {
  SpacePtr space = build_space(kUnit, 5, 16, 16);
  MaterialParams material = testing::material();
  LoadCase load;
};

TEST(Solver, EnergyIdentityOnPointLoad) {
  Fixture fx;
  const ConstantField kappa(2.0);
  const Deflection w = solve_plate(fx.space, fx.material, kappa, fx.load);
  const SparseMatrix K = assemble_stiffness(*fx.space, fx.material);
  const SparseMatrix M = assemble_kappa_mass(*fx.space, kappa);
  const Eigen::VectorXd& c = w.coefficients();
  const double energy = c.dot(K * c + M * c);
  const double work = fx.load.f(kUnit.rho0) * w.value(fx.load.P0);
  EXPECT_LE(testing::relative(energy, work), 1e-8);
  EXPECT_GT(w.value(fx.load.P0), 0.0);
  EXPECT_EQ(w.meta().kappa, kappa.describe());
}

TEST(Solver, CenterLoadIsDihedrallySymmetric) {
  Fixture fx;
  const Deflection w = solve_plate(fx.space, fx.material, ConstantField(1.0), fx.load);
  double defect = 0.0, scale = 0.0;
  for (int j = 0; j <= 20; ++j)
    for (int i = 0; i <= 20; ++i) {
      const double x = i / 20.0, y = j / 20.0;
      const double v = w.value({x, y});
      scale = std::max(scale, std::fabs(v));
      for (Point q : {Point{y, x}, Point{1 - x, y}, Point{x, 1 - y}, Point{1 - y, 1 - x}})
        defect = std::max(defect, std::fabs(w.value(q) - v));
    }
  EXPECT_LE(defect, 1e-10 * scale);
}

TEST(Solver, ConjugateGradientAgreesWithDirect) {
  Fixture fx;
  fx.space = build_space(kUnit, 5, 8, 8);
  const ConstantField kappa(2.0);
  const SparseMatrix K = assemble_stiffness(*fx.space, fx.material);
  const SparseMatrix M = assemble_kappa_mass(*fx.space, kappa);
  const Eigen::VectorXd F = point_load_vector(*fx.space, fx.load.P0, 1.0, fx.load.d);
  SolveOptions cg;
  cg.method = LinearSolver::ConjugateGradient;
  cg.residual_target = 1e-9;
  SolveReport rep;
  const Eigen::VectorXd a = solve_system(K, M, F);
  const Eigen::VectorXd b = solve_system(K, M, F, cg, &rep);
  EXPECT_LE((a - b).norm(), 1e-7 * a.norm());
  EXPECT_GT(rep.iterations, 0);
}

TEST(Solver, ZeroLoadGivesZeroDeflection) {
  Fixture fx;
  fx.space = build_space(kUnit, 5, 6, 6);
  const SparseMatrix K = assemble_stiffness(*fx.space, fx.material);
  const SparseMatrix M = assemble_kappa_mass(*fx.space, ConstantField(1.0));
  EXPECT_EQ(solve_system(K, M, Eigen::VectorXd::Zero(K.rows())).norm(), 0.0);
}

TEST(Solver, NonFiniteDataIsNumericFailure) {
  Fixture fx;
  fx.space = build_space(kUnit, 5, 6, 6);
  const SparseMatrix K = assemble_stiffness(*fx.space, fx.material);
  const SparseMatrix M = assemble_kappa_mass(*fx.space, ConstantField(1.0));
  Eigen::VectorXd F = Eigen::VectorXd::Ones(K.rows());
  F[0] = std::numeric_limits<double>::quiet_NaN();
  try {
    (void)solve_system(K, M, F);
    FAIL() << "expected NumericFailure";
  } catch (const Error& e) {
    EXPECT_TRUE(e.is_numeric());
  }
}

TEST(Solver, LoadPlacementIsValidated) {
  LoadCase load;
  load.P0 = {0.1, 0.5};
  try {
    load.validate(kUnit);
    FAIL() << "expected LoadPlacement";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::LoadPlacement);
  }
  load.P0 = {0.5, 0.5};
  EXPECT_NO_THROW(load.validate(kUnit));
}

class LoadNeighborhoodTest : public ::testing::TestWithParam<double> {};

// Dense ring sampling of w around P0, independent of the solver's own search.
TEST_P(LoadNeighborhoodTest, DeflectionStaysAboveHalfNearTheLoad) {
  Fixture fx;
  fx.load.d = GetParam();
  const Deflection w = solve_plate(fx.space, fx.material, ConstantField(2.0), fx.load);
  const LoadNeighborhood nb = check_load_neighborhood(w, fx.load);
  EXPECT_TRUE(nb.ok);
  EXPECT_GT(nb.w_P0, 0.0);
  EXPECT_GT(nb.sigma_bar_emp, 0.0);
  EXPECT_LE(nb.sigma_bar_emp, fx.load.d / 2 + 1e-15);
  double lowest = std::numeric_limits<double>::infinity();
  for (int r = 1; r <= 40; ++r)
    for (int a = 0; a < 180; ++a) {
      const double rad = nb.sigma_bar_emp * r / 40.0, th = 2 * 3.14159265358979 * a / 180.0;
      lowest = std::min(lowest, w.value({0.5 + rad * std::cos(th), 0.5 + rad * std::sin(th)}));
    }
  EXPECT_GE(lowest, 0.5 * nb.w_P0 * (1 - 1e-9));
  for (const AnnulusCheck& a : nb.annuli) EXPECT_GT(a.energy, 0.0);
}

INSTANTIATE_TEST_SUITE_P(Separations, LoadNeighborhoodTest, ::testing::Values(0.2, 0.3, 0.4));

TEST(Solver, EvaluateRejectsHighOrders) {
  Fixture fx;
  fx.space = build_space(kUnit, 5, 6, 6);
  const SplineFunction w(fx.space, Eigen::VectorXd::Ones(fx.space->num_active()));
  const std::vector<Point> pts{{0.5, 0.5}};
  EXPECT_EQ(evaluate(w, pts, 3).size(), 1u);
  EXPECT_THROW((void)evaluate(w, pts, 4), Error);
}

TEST(Solver, MaterialHashIsStableAndSensitive) {
  const MaterialParams a = testing::material();
  MaterialParams b = testing::material();
  EXPECT_EQ(material_hash(a), material_hash(b));
  b.l1 = 0.11;
  EXPECT_NE(material_hash(a), material_hash(b));
  EXPECT_EQ(material_hash(a).size(), 16u);
}

}  // namespace
}  // namespace nanoplate
