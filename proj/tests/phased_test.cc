//
// Copyright 2026 The userdp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include <cmath>

#include <gtest/gtest.h>

#include "userdp/errors.h"
#include "userdp/generators.h"
#include "userdp/phased.h"

namespace userdp {
namespace {

TEST(ScheduleTest, CeilLog2) {
  EXPECT_EQ(ceil_log2(100), 7);
  EXPECT_EQ(ceil_log2(64), 6);
  EXPECT_EQ(ceil_log2(65), 7);
  EXPECT_EQ(ceil_log2(1), 0);
  EXPECT_THROW(ceil_log2(0), ArgumentError);
}

TEST(ScheduleTest, DefaultLambda) {
  EXPECT_NEAR(default_lambda(1, 1, 4, 100, 25), 1.0 / 250, 1e-18);
}

TEST(ScheduleTest, ErmBudgets) {
  const PhasedConfig cfg(PrivacyParams(1, 1e-5), 1);
  const PhasedSchedule s = erm_schedule(cfg, 10, 10, 4, 2);
  ASSERT_EQ(s.T, 7);
  ASSERT_EQ(s.phases.size(), 7u);
  EXPECT_NEAR(s.beta, 0.01, 1e-18);
  double eps = 0, delta = 0;
  for (const PhaseSpec& p : s.phases) {
    eps += p.eps;
    delta += p.delta;
    EXPECT_EQ(p.beta, s.beta / 7);
    EXPECT_NEAR(p.lambda, s.lambda * std::pow(4.0, p.index), 1e-15 * p.lambda);
    EXPECT_NEAR(p.radius, 1 / p.lambda, 1e-15 * p.radius);
    EXPECT_EQ(p.first_user, 0);
    EXPECT_EQ(p.end_user, 10);
  }
  EXPECT_NEAR(eps, 1, 1e-12);
  EXPECT_NEAR(delta, 1e-5, 1e-17);
  for (std::size_t i = 1; i < s.phases.size(); ++i)
    EXPECT_NEAR(s.phases[i].radius, s.phases[i - 1].radius / 4, 1e-15);
}

TEST(ScheduleTest, ErmNeedsBoundedRegionOrLambda) {
  PhasedConfig cfg(PrivacyParams(1, 1e-5), 1);
  const double inf = std::numeric_limits<double>::infinity();
  EXPECT_THROW(erm_schedule(cfg, 10, 10, 4, inf), ConfigError);
  cfg.lambda = 0.1;
  EXPECT_NO_THROW(erm_schedule(cfg, 10, 10, 4, inf));
}

TEST(ScheduleTest, ScoSlices) {
  PhasedConfig cfg(PrivacyParams(1, std::exp(-1.0)), 1);
  cfg.threshold_C = 4;
  const PhasedSchedule s = sco_schedule(cfg, 64, 1, 2, 2);
  ASSERT_EQ(s.T, 4);
  const std::vector<Index> sizes = {32, 16, 8, 4};
  for (int i = 0; i < 4; ++i) {
    const PhaseSpec& p = s.phases[i];
    EXPECT_EQ(p.end_user - p.first_user, sizes[i]);
    EXPECT_EQ(p.eps, 1);
    EXPECT_EQ(p.delta, std::exp(-1.0));
    if (i > 0) EXPECT_EQ(p.end_user, s.phases[i - 1].first_user);
  }
  EXPECT_LE(s.phases[0].end_user, 64);
  EXPECT_GE(s.phases[3].first_user, 0);
}

TEST(ScheduleTest, ScoNeedsTwoN0) {
  const PhasedConfig cfg(PrivacyParams(1, 1e-5), 1);
  EXPECT_THROW(sco_schedule(cfg, 200, 1, 2, 2), ConfigError);
  EXPECT_NO_THROW(sco_schedule(cfg, 240, 1, 2, 2));
}

TEST(ReductionPlanTest, RadiusFormula) {
  const PhasedConfig cfg(PrivacyParams(0.8, 1e-4), 1.5);
  const double mu = 0.7;
  const Index n = 300, m = 9, d = 6;
  const ReductionPlan erm = reduction_plan(false, cfg, mu, n, m, d);
  const double beta = 1.0 / (2.0 * n * n * m);
  const double L = std::log(1 / beta);
  const double target = 10 * 1.5 * std::sqrt(L) / (mu * n * 3);
  const double eps_bar = 0.2;
  const double delta_bar = 0.5e-4 / (std::exp(eps_bar) + 2);
  const int kappa = 1 + static_cast<int>(std::ceil(std::log(1 / delta_bar) / eps_bar));
  const double sigma = 2 * std::sqrt(std::log(2 / delta_bar)) * 8 * kappa * target / eps_bar;
  const double R = sigma * std::sqrt(d * L);
  EXPECT_NEAR(erm.beta, beta, 1e-25);
  EXPECT_NEAR(erm.stage1_sigma, sigma, 1e-12 * sigma);
  EXPECT_NEAR(erm.radius, R, 1e-12 * R);
  EXPECT_NEAR(erm.lambda, 1.5 * std::sqrt(6.0) / (R * n * 3), 1e-12 * erm.lambda);
  const ReductionPlan sco = reduction_plan(true, cfg, mu, n, m, d);
  EXPECT_GT(sco.radius, erm.radius);
  EXPECT_NEAR(sco.radius - erm.radius, 1.5 * std::sqrt(L) / (mu * std::sqrt(n * m * 1.0)),
              1e-12 * sco.radius);
  const PhasedConfig stage2 = stage2_config(cfg, erm);
  EXPECT_EQ(stage2.privacy.eps, 0.4);
  EXPECT_EQ(stage2.privacy.delta, 0.5e-4);
  EXPECT_EQ(*stage2.lambda, erm.lambda);
}

UserDataset tight_data(Index n, Index m, Index d, std::uint64_t seed) {
  RandomSource rng(seed);
  TruncatedGaussianSpec spec{Vector::Zero(d), 0.01, 1};
  spec.chi(0) = 0.5;
  return trunc_gauss_dataset(spec, n, m, rng);
}

// Non-private localization: every phase stays inside its ball, and
// the localization inequality holds for theta sampled from K.
TEST(PhasedErmTest, LocalizationInvariantsAndInequality) {
  const Index d = 3;
  const UserDataset ds = tight_data(30, 4, d, 1);
  const FeasibleRegion K = FeasibleRegion::ball(Vector::Zero(d), 1);
  const LossPtr loss = make_squared_loss(0.5, 2);
  PhasedConfig cfg(PrivacyParams(1, 1e-5), 2);
  cfg.non_private = true;
  RandomSource rng(2);
  const MechanismResult r = phased_erm(loss, ds, K, cfg, rng);
  ASSERT_FALSE(r.is_bottom());
  const auto& phases = r.trace().phases;
  ASSERT_EQ(phases.size(), 7u);
  RandomSource sampler(3);
  for (std::size_t i = 0; i < phases.size(); ++i) {
    const PhaseTrace& p = phases[i];
    ASSERT_TRUE(p.output.has_value());
    EXPECT_LE((*p.output - p.center).norm(), p.radius * (1 + 1e-9));
    EXPECT_TRUE(K.contains(*p.output));
    if (i > 0) EXPECT_EQ(p.center, *phases[i - 1].output);
    const RegularizedObjective obj(loss, p.center, p.lambda);
    const Vector star = erm_minimize(obj, ds, K.intersect(Ball{p.center, p.radius}), {});
    const double Lstar = empirical_loss(*loss, ds, star);
    for (int s = 0; s < 200; ++s) {
      Vector theta = gaussian_vector(d, 1, sampler);
      theta *= std::pow(sampler.uniform01(), 1.0 / d) / theta.norm();
      EXPECT_LE(Lstar - empirical_loss(*loss, ds, theta),
                0.5 * p.lambda * (p.center - theta).squaredNorm() + 1e-9);
    }
  }
  EXPECT_EQ(phases.front().center, K.anchor());
  EXPECT_EQ(r.theta(), *phases.back().output);
}

TEST(PhasedErmTest, PrivateRunReleases) {
  const Index d = 2;
  const UserDataset ds = tight_data(800, 1, d, 4);
  const FeasibleRegion K = FeasibleRegion::ball(Vector::Zero(d), 1);
  PhasedConfig cfg(PrivacyParams(1, 0.5), 4);
  RandomSource rng(5);
  const MechanismResult r = phased_erm(make_squared_loss(1, 4), ds, K, cfg, rng);
  ASSERT_FALSE(r.is_bottom());
  EXPECT_EQ(r.trace().phases.size(), 10u);
  EXPECT_TRUE(K.contains(r.theta()));
  for (const PhaseTrace& p : r.trace().phases) EXPECT_FALSE(p.bottom);
}

TEST(PhasedErmTest, BottomRecordsFailingPhase) {
  const UserDataset ds = two_cluster_dataset(800, 1, 2, 1);
  const FeasibleRegion K = FeasibleRegion::ball(Vector::Zero(2), 1);
  PhasedConfig cfg(PrivacyParams(1, 0.5), 4);
  RandomSource rng(6);
  const MechanismResult r = phased_erm(make_squared_loss(1, 4), ds, K, cfg, rng);
  ASSERT_TRUE(r.is_bottom());
  ASSERT_TRUE(r.trace().failed_phase.has_value());
  const int failed = *r.trace().failed_phase;
  ASSERT_EQ(r.trace().phases.size(), static_cast<std::size_t>(failed));
  for (int i = 0; i + 1 < failed; ++i) EXPECT_FALSE(r.trace().phases[i].bottom);
  EXPECT_TRUE(r.trace().phases.back().bottom);
  EXPECT_TRUE(r.trace().budget_exhausted);
}

TEST(PhasedErmTest, ErrorsCarryPhaseIndex) {
  const UserDataset ds = tight_data(20, 4, 2, 7);
  PhasedConfig cfg(PrivacyParams(1, 1e-5), 2);
  RandomSource rng(8);
  try {
    phased_erm(make_squared_loss(0.5, 2), ds, FeasibleRegion::ball(Vector::Zero(2), 1),
               cfg, rng);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(std::string(e.what()).rfind("phase 1:", 0), 0u) << e.what();
  }
}

TEST(PhasedScoTest, PhasesUseDisjointSlices) {
  const UserDataset ds = tight_data(64, 2, 2, 9);
  PhasedConfig cfg(PrivacyParams(1, std::exp(-1.0)), 2);
  cfg.threshold_C = 4;
  cfg.non_private = true;
  RandomSource rng(10);
  const MechanismResult r = phased_sco(make_squared_loss(0.5, 2), ds,
                                       FeasibleRegion::ball(Vector::Zero(2), 1), cfg, rng);
  ASSERT_FALSE(r.is_bottom());
  EXPECT_EQ(r.trace().phases.size(), 4u);
}

TEST(ReductionTest, NonPrivateStagesTagged) {
  const UserDataset ds = tight_data(40, 4, 2, 11);
  const LossPtr loss = make_squared_loss(0.5, 2);
  const FeasibleRegion K = FeasibleRegion::ball(Vector::Zero(2), 1);
  PhasedConfig cfg(PrivacyParams(1, 1e-5), 2);
  cfg.non_private = true;
  RandomSource rng(12);
  const MechanismResult r = strongly_convex_erm(loss, ds, K, cfg, rng);
  ASSERT_FALSE(r.is_bottom());
  EXPECT_EQ(r.trace().stage, "stage2");
  const Vector exact = erm_minimize(RegularizedObjective(loss), ds, K, {});
  EXPECT_LE((*r.trace().stage1_output - exact).norm(), 1e-12);
}

TEST(ReductionTest, StageOneBottomIsTagged) {
  const UserDataset ds = two_cluster_dataset(800, 1, 2, 1);
  PhasedConfig cfg(PrivacyParams(1, 0.5), 4);
  RandomSource rng(13);
  const MechanismResult r = strongly_convex_sco(
      make_squared_loss(1, 4), ds, FeasibleRegion::ball(Vector::Zero(2), 1), cfg, rng);
  ASSERT_TRUE(r.is_bottom());
  EXPECT_EQ(r.trace().stage, "stage1");
}

}  // namespace
}  // namespace userdp
