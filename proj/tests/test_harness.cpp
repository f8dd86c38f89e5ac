#include <gtest/gtest.h>

#include "nanoplate/error.hpp"
#include "nanoplate/harness.hpp"
#include "support.hpp"

namespace nanoplate {
namespace {

TEST(Harness, FitLineRecoversExactSlope) {
  const LinearFit f = fit_line({0.0, 1.0, 2.0, 3.0}, {1.0, 3.5, 6.0, 8.5});
  EXPECT_NEAR(f.slope, 2.5, 1e-14);
  EXPECT_NEAR(f.intercept, 1.0, 1e-14);
}

TEST(Harness, CaseSeedsAreDeterministicAndDistinct) {
  EXPECT_EQ(case_seed(1, 1e-4), case_seed(1, 1e-4));
  EXPECT_NE(case_seed(1, 1e-4), case_seed(2, 1e-4));
  EXPECT_NE(case_seed(1, 1e-4), case_seed(1, 1e-5));
}

std::vector<PairRecord> power_law(double exponent) {
  std::vector<PairRecord> out;
  for (double e : {1e-4, 1e-3, 1e-2, 1e-1}) {
    PairRecord r;
    r.epsilon = e;
    r.weighted_misfit = 3.0 * std::pow(e, exponent);
    out.push_back(r);
  }
  return out;
}

TEST(Harness, KeyEstimateOnSyntheticPowerLaws) {
  const double s = 0.5;
  const KeyEstimate good = verify_key_estimate(power_law(2.0), s);
  EXPECT_TRUE(good.pass);
  EXPECT_NEAR(good.fitted_slope, 2.0, 1e-12);
  EXPECT_NEAR(good.required_slope, 1.0 / 6.5, 1e-15);
  EXPECT_NEAR(good.worst_slack, 0.0, 1e-12);
  const KeyEstimate bad = verify_key_estimate(power_law(0.01), s);
  EXPECT_FALSE(bad.pass);
  EXPECT_THROW((void)verify_key_estimate(power_law(2.0), 1.5), Error);
}

TEST(KappaFamilies, BumpDerivativesMatchFiniteDifferences) {
  KappaFamily fam;
  const FieldPtr k = fam.make(PlateDomain{});
  const Point p{0.37, 0.61};
  const double h = 1e-5;
  const Partials d = k->partials(p, 3);
  const Partials px = k->partials({p.x + h, p.y}, 2), mx = k->partials({p.x - h, p.y}, 2);
  const Partials py = k->partials({p.x, p.y + h}, 2), my = k->partials({p.x, p.y - h}, 2);
  for (int t = 0; t <= 2; ++t)
    for (int ny = 0; ny <= t; ++ny) {
      const int nx = t - ny;
      EXPECT_NEAR(d(nx + 1, ny), (px(nx, ny) - mx(nx, ny)) / (2 * h), 1e-5);
      EXPECT_NEAR(d(nx, ny + 1), (py(nx, ny) - my(nx, ny)) / (2 * h), 1e-5);
    }
  const double r2 = (p.x - 0.5) * (p.x - 0.5) + (p.y - 0.5) * (p.y - 0.5);
  EXPECT_NEAR(d(0, 0), 2.0 + std::exp(-r2 / (2 * 0.04)), 1e-14);
}

TEST(KappaFamilies, BandLimitedDrawsAreSeeded) {
  KappaFamily fam;
  fam.kind = KappaFamily::Kind::BandLimited;
  const PlateDomain dom;
  const FieldPtr a = fam.make(dom, 0), b = fam.make(dom, 0), c = fam.make(dom, 1);
  EXPECT_EQ(a->value({0.3, 0.4}), b->value({0.3, 0.4}));
  EXPECT_NE(a->value({0.3, 0.4}), c->value({0.3, 0.4}));
  EXPECT_EQ(kappa_family_kind("band_limited"), KappaFamily::Kind::BandLimited);
  EXPECT_THROW((void)kappa_family_kind("spiky"), Error);
}

TEST(Harness, ConfigValidation) {
  ExperimentConfig cfg = default_experiment();
  EXPECT_NO_THROW(cfg.validate());
  cfg.s = 1.0;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = default_experiment();
  cfg.epsilons = {1e-3, 1e-4};
  EXPECT_THROW(cfg.validate(), Error);
  cfg = default_experiment();
  cfg.epsilons = {1e-5, 1e-4, 1e-3};
  try {
    (void)stability_sweep(cfg);
    FAIL() << "expected InvalidConfig";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidConfig);
  }
}

class ExperimentTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    cfg_ = new ExperimentConfig(default_experiment());
    ex_ = new Experiment(*cfg_);
    kappa_ = cfg_->kappa.make(cfg_->domain);
    w1_ = new Deflection(ex_->solve(*kappa_));
  }
  static void TearDownTestSuite() {
    delete w1_;
    delete ex_;
    delete cfg_;
  }
  static ExperimentConfig* cfg_;
  static Experiment* ex_;
  static FieldPtr kappa_;
  static Deflection* w1_;
};

ExperimentConfig* ExperimentTest::cfg_ = nullptr;
Experiment* ExperimentTest::ex_ = nullptr;
FieldPtr ExperimentTest::kappa_;
Deflection* ExperimentTest::w1_ = nullptr;

TEST_F(ExperimentTest, PerturbedMeasurementHasTheRequestedGap) {
  for (double eps : {1e-6, 1e-3}) {
    const Deflection wm = perturbed_measurement(*ex_, *w1_, eps, 7);
    const LinearCombinationField gap(1.0, std::make_shared<Deflection>(wm), -1.0, std::make_shared<Deflection>(*w1_));
    EXPECT_NEAR(l2_norm(gap, Region::rectangle(cfg_->domain.rect())), eps, 1e-9 * eps);
  }
}

TEST_F(ExperimentTest, ConstantShiftPairs) {
  const std::vector<PairRecord> pairs = shift_family(*ex_, *kappa_);
  ASSERT_EQ(pairs.size(), cfg_->shifts.size());
  const Region inner = ex_->interior();
  const double w1_sq = std::pow(l2_norm(*w1_, inner), 2);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const double c = cfg_->shifts[i];
    EXPECT_NEAR(pairs[i].weighted_misfit, c * c * w1_sq, 1e-8 * c * c * w1_sq);
    EXPECT_NEAR(pairs[i].kappa_gap, c * std::sqrt(inner.area()), 1e-8 * c);
    EXPECT_GT(pairs[i].epsilon, 0.0);
    if (i > 0) {
      EXPECT_GT(pairs[i].epsilon, pairs[i - 1].epsilon);
    }
  }
  EXPECT_TRUE(verify_key_estimate(pairs, cfg_->s).pass);
}

TEST_F(ExperimentTest, InadmissibleTruthIsRejected) {
  try {
    (void)ex_->run_pair(*kappa_, ConstantField(50.0));
    FAIL() << "expected InvalidCoefficient";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidCoefficient);
  }
}

TEST_F(ExperimentTest, NoiseFreeCaseRecordsTheFloor) {
  const SweepRecord r = reconstruct_case(*ex_, *kappa_, *w1_, 0.0, 0);
  EXPECT_FALSE(r.degenerate) << r.note;
  EXPECT_EQ(r.realized_gap, 0.0);
  EXPECT_LT(r.relative_error, 0.1);
  EXPECT_EQ(r.sigma, cfg_->sigma);
}

}  // namespace
}  // namespace nanoplate
