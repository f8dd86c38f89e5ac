#include <gtest/gtest.h>

#include <filesystem>
#include <numeric>
#include <random>

#include "nanoplate/error.hpp"
#include "nanoplate/inverse.hpp"
#include "nanoplate/norms.hpp"
#include "support.hpp"

namespace nanoplate {
namespace {

const PlateDomain kUnit{};

FieldPtr bump() {
  return testing::value_field([](Point p) {
    const double r2 = (p.x - 0.5) * (p.x - 0.5) + (p.y - 0.5) * (p.y - 0.5);
    return 2.0 + std::exp(-r2 / (2 * 0.2 * 0.2));
  });
}

struct ClosedLoop {
  SpacePtr space = build_space(kUnit, 5, 32, 32);
  SpacePtr coef = coefficient_space_for(*space);
  MaterialParams material = testing::material();
  LoadCase load;
  ReconstructionOptions options;

  ClosedLoop() {
    options.sigma = 0.125;
    options.exclusion_radius = 0.05;
  }

  Deflection solve(const ScalarField& kappa) const { return solve_plate(space, material, kappa, load); }

  double relative_error(const ScalarField& got, const ScalarField& want) const {
    const Region inner = interior_region(kUnit, options.sigma);
    const LinearCombinationField diff(1.0, std::shared_ptr<const ScalarField>(&got, [](const ScalarField*) {}), -1.0,
                                      std::shared_ptr<const ScalarField>(&want, [](const ScalarField*) {}));
    return l2_norm(diff, inner) / l2_norm(want, inner);
  }
};

TEST(Measurement, SampleGridCoversThePlate) {
  const std::vector<Point> g = sample_grid(kUnit, 5);
  ASSERT_EQ(g.size(), 25u);
  EXPECT_EQ(g.front().x, 0.0);
  EXPECT_EQ(g.back().x, 1.0);
  EXPECT_EQ(g.back().y, 1.0);
}

TEST(Measurement, NoiseIsSeededAndScaled) {
  Measurement a = sample_field(ConstantField(0.0), sample_grid(kUnit, 101));
  Measurement b = a, c = a;
  add_noise(a, 1e-3, 2.0, 3.0, 42);
  add_noise(b, 1e-3, 2.0, 3.0, 42);
  add_noise(c, 1e-3, 2.0, 3.0, 43);
  EXPECT_EQ(a.values, b.values);
  EXPECT_NE(a.values, c.values);
  EXPECT_DOUBLE_EQ(a.noise_std, 6e-3);
  const double n = static_cast<double>(a.values.size());
  const double mean = std::accumulate(a.values.begin(), a.values.end(), 0.0) / n;
  double var = 0.0;
  for (double v : a.values) var += (v - mean) * (v - mean);
  EXPECT_NEAR(std::sqrt(var / (n - 1)), 6e-3, 6e-3 * 0.05);
  EXPECT_NEAR(mean, 0.0, 5 * 6e-3 / std::sqrt(n));
  EXPECT_THROW(add_noise(a, -1.0, 1.0, 1.0, 1), Error);
}

TEST(Projection, ExactSamplesReproduceTheSpline) {
  const SpacePtr s = build_space(kUnit, 5, 8, 8);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n;
  Eigen::VectorXd c(s->num_active());
  for (Eigen::Index i = 0; i < c.size(); ++i) c[i] = n(rng);
  const SplineFunction w(s, c);
  const Measurement m = sample_field(w, sample_grid(kUnit, 41));
  const Deflection p = project_measurement(m, s);
  EXPECT_LE((p.coefficients() - c).norm(), 1e-9 * c.norm());
}

TEST(Projection, TooFewSamplesAreRejected) {
  const SpacePtr s = build_space(kUnit, 5, 8, 8);
  const Measurement m = sample_field(ConstantField(1.0), sample_grid(kUnit, 4));
  try {
    (void)project_measurement(m, s);
    FAIL() << "expected InsufficientSamples";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InsufficientSamples);
  }
}

TEST(Projection, DiscrepancySmoothingMatchesNoiseLevel) {
  const SpacePtr s = build_space(kUnit, 5, 16, 16);
  const Deflection w = solve_plate(s, testing::material(), ConstantField(2.0), LoadCase{});
  Measurement m = sample_field(w, sample_grid(kUnit, 61));
  add_noise(m, 1e-3, 1.0, 1.0, 5);
  ProjectionReport rep;
  (void)project_measurement(m, s, {}, &rep);
  EXPECT_GT(rep.smoothing, 0.0);
  EXPECT_NEAR(rep.rms_residual, 1e-3, 0.02e-3);
}

TEST(Reconstruction, TikhonovMatchesNormalEquations) {
  ClosedLoop cl;
  cl.space = build_space(kUnit, 5, 16, 16);
  cl.coef = coefficient_space_for(*cl.space);
  cl.options.sigma = 0.125;
  cl.options.exclusion_radius = 0.0;
  cl.options.include_P0 = true;
  const Deflection w = cl.solve(ConstantField(2.0));
  const ReconstructionSystem sys = build_reconstruction_system(w, cl.load, cl.material, cl.coef, cl.options);
  const double alpha = 1e-6;
  const ReconstructionResult res = solve_reconstruction(sys, alpha);
  const double scaled = alpha * sys.A.squaredNorm() / static_cast<double>(sys.A.cols());
  const Eigen::MatrixXd N = sys.A.transpose() * sys.A + scaled * Eigen::MatrixXd::Identity(sys.A.cols(), sys.A.cols());
  const Eigen::VectorXd want = N.ldlt().solve(sys.A.transpose() * sys.r);
  EXPECT_LE((res.unclipped - want).norm(), 1e-6 * want.norm());
}

TEST(Reconstruction, ResidualMatchesAssembledWeakForm) {
  ClosedLoop cl;
  cl.space = build_space(kUnit, 5, 16, 16);
  cl.coef = coefficient_space_for(*cl.space);
  cl.options.sigma = 0.125;
  cl.options.exclusion_radius = 0.0;
  cl.options.include_P0 = true;
  const Deflection w = cl.solve(*bump());
  const ReconstructionSystem sys = build_reconstruction_system(w, cl.load, cl.material, cl.coef, cl.options);
  const ReconstructionResult res = solve_reconstruction(sys, 1e-8);
  const double independent = weak_form_residual(w, cl.load, cl.material, *res.kappa, sys.tests);
  EXPECT_NEAR(independent, res.residual, 1e-9 * std::max(res.residual, sys.r.norm()));
}

TEST(Reconstruction, ClosedLoopInSpanIsExact) {
  ClosedLoop cl;
  const auto truth = project_coefficient(*bump(), cl.coef);
  const Deflection w = cl.solve(*truth);
  const ReconstructionResult res = reconstruct_kappa(w, cl.load, cl.material, cl.coef, 1e-12, cl.options);
  EXPECT_LE(cl.relative_error(*res.kappa, *truth), 1e-6);
  EXPECT_EQ(res.clipped, 0);
}

TEST(Reconstruction, ClosedLoopSmoothOutsideSpan) {
  ClosedLoop cl;
  const FieldPtr truth = bump();
  const Deflection w = cl.solve(*truth);
  const ReconstructionResult res = reconstruct_kappa(w, cl.load, cl.material, cl.coef, 1e-12, cl.options);
  EXPECT_LE(cl.relative_error(*res.kappa, *truth), 1e-2);
}

TEST(Reconstruction, MaskGrowsTowardTheBoundary) {
  ClosedLoop cl;
  cl.space = build_space(kUnit, 5, 16, 16);
  cl.coef = coefficient_space_for(*cl.space);
  cl.options.include_P0 = true;
  const Deflection w = cl.solve(ConstantField(2.0));
  cl.options.sigma = 0.0625;
  const double near = build_reconstruction_system(w, cl.load, cl.material, cl.coef, cl.options).mask_fraction;
  cl.options.sigma = 0.25;
  const double far = build_reconstruction_system(w, cl.load, cl.material, cl.coef, cl.options).mask_fraction;
  EXPECT_GT(near, far);
}

TEST(Reconstruction, DegenerateInputs) {
  ClosedLoop cl;
  const SplineFunction zero(cl.space, Eigen::VectorXd::Zero(cl.space->num_active()));
  try {
    (void)build_reconstruction_system(zero, cl.load, cl.material, cl.coef, cl.options);
    FAIL() << "expected DegenerateData";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegenerateData);
  }
  const Deflection w = cl.solve(ConstantField(2.0));
  const ReconstructionSystem sys = build_reconstruction_system(w, cl.load, cl.material, cl.coef, cl.options);
  EXPECT_THROW((void)solve_reconstruction(sys, 0.0), Error);

  // On 16 spans a degree-5 support is 0.375 wide and cannot sit inside the
  // interior while avoiding the load disc.
  const SpacePtr coarse = build_space(kUnit, 5, 16, 16);
  const Deflection wc = solve_plate(coarse, cl.material, ConstantField(2.0), cl.load);
  try {
    (void)build_reconstruction_system(wc, cl.load, cl.material, coefficient_space_for(*coarse), cl.options);
    FAIL() << "expected DegenerateData";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegenerateData);
  }
}

// Two-column system with known residual curve.
ReconstructionSystem toy_system() {
  ReconstructionSystem sys;
  sys.coef_space = build_coefficient_space(kUnit, 2, 1, 1);
  const int nk = sys.coef_space->num_active();
  sys.A = Eigen::MatrixXd::Zero(nk + 2, nk);
  for (int k = 0; k < nk; ++k) sys.A(k, k) = 1.0 / (k + 1.0);
  sys.r = Eigen::VectorXd::Ones(nk + 2);
  sys.kbar = 1e6;
  return sys;
}

TEST(Reconstruction, DiscrepancyChoice) {
  const ReconstructionSystem sys = toy_system();
  const std::vector<double> alphas{1e-6, 1e-4, 1e-2, 1.0};
  std::vector<double> res;
  for (double a : alphas) res.push_back(solve_reconstruction(sys, a).unclipped_residual);
  ASSERT_TRUE(std::is_sorted(res.begin(), res.end()));
  // Noise level between the second and third residual selects the third.
  AlphaChoice c = choose_alpha(sys, alphas, 0.5 * (res[1] + res[2]));
  EXPECT_EQ(c.alpha, 1e-2);
  EXPECT_TRUE(c.monotone);
  c = choose_alpha(sys, alphas, 0.0);
  EXPECT_EQ(c.alpha, 1e-6);
  c = choose_alpha(sys, alphas, 1e9);
  EXPECT_EQ(c.alpha, 1.0);
  EXPECT_THROW((void)choose_alpha(sys, {}, 0.0), Error);
}

TEST(Reconstruction, ClippingToAdmissibleRange) {
  ReconstructionSystem sys = toy_system();
  sys.r *= -1.0;
  sys.kbar = 10.0;
  const ReconstructionResult res = solve_reconstruction(sys, 1e-8);
  EXPECT_GT(res.clipped, 0);
  EXPECT_GE(res.kappa->coefficients().minCoeff(), 0.0);
  EXPECT_LE(res.kappa->coefficients().maxCoeff(), 10.0);
}

TEST(Measurement, CsvRoundTrip) {
  Measurement m = sample_field(ConstantField(0.25), sample_grid(kUnit, 3));
  add_noise(m, 1e-2, 1.0, 1.0, 9);
  m.sigma = 0.125;
  const auto path = (std::filesystem::temp_directory_path() / "nanoplate_measurement.csv").string();
  write_measurement_csv(m, path);
  const Measurement r = read_measurement_csv(path);
  ASSERT_EQ(r.size(), m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    EXPECT_EQ(r.values[i], m.values[i]);
    EXPECT_EQ(r.points[i].x, m.points[i].x);
  }
  EXPECT_EQ(r.epsilon, m.epsilon);
  EXPECT_EQ(r.seed, m.seed);
  EXPECT_EQ(r.sigma, m.sigma);
}

}  // namespace
}  // namespace nanoplate
