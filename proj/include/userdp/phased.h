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

#ifndef USERDP_PHASED_H_
#define USERDP_PHASED_H_

#include <optional>
#include <string>
#include <vector>

#include "userdp/dataset.h"
#include "userdp/loss.h"
#include "userdp/mechanisms.h"
#include "userdp/privacy.h"
#include "userdp/random.h"
#include "userdp/region.h"
#include "userdp/result.h"

namespace userdp {

enum class Algorithm { kPhasedErm, kPhasedSco, kStronglyConvexErm,
                       kStronglyConvexSco };

std::string algorithm_name(Algorithm a);

struct PhasedConfig {
  PhasedConfig(PrivacyParams p, double G_in) : privacy(p), G(G_in) {}

  PrivacyParams privacy;
  double G;
  // Defaults: lambda = G sqrt(d) / (R n sqrt(m)) with R the region
  // diameter, beta = 1/(nm) (1/(2 n^2 m) for the strongly convex
  // reductions).
  std::optional<double> lambda;
  std::optional<double> beta;
  double threshold_C = 10;  // also the C in N0 = C ln(1/delta)/eps
  ProbeMode mode = ProbeMode::kCertificate;
  double enumeration_budget = kDefaultEnumerationBudget;
  long max_iters = 200000;
  bool non_private = false;
};

struct PhaseSpec {
  int index = 0;  // 1-based
  double eps = 0;
  double delta = 0;
  double beta = 0;
  double lambda = 0;
  double radius = 0;  // G / lambda
  int kappa = 0;
  double target_sensitivity = 0;  // with 2G and mu = lambda
  double sigma = 0;
  Index first_user = 0;  // 0-based, half open
  Index end_user = 0;
};

struct PhasedSchedule {
  Algorithm algorithm = Algorithm::kPhasedErm;
  Index n = 0, m = 0, d = 0;
  double G = 0;
  double lambda = 0;
  double beta = 0;
  double N0 = 0;  // Phased-SCO only
  int T = 0;
  double eps_phase = 0;
  double delta_phase = 0;
  double beta_phase = 0;
  std::vector<PhaseSpec> phases;
};

// lambda = G sqrt(d) / (R n sqrt(m)).
double default_lambda(double G, double R, Index d, Index n, Index m);

// Smallest T with 2^T >= x (x > 0).
int ceil_log2(double x);

// T = ceil(log2(nm)); each phase gets (eps/T, delta/T, beta/T) and the
// whole dataset.
PhasedSchedule erm_schedule(const PhasedConfig& cfg, Index n, Index m,
                            Index d, double diameter);

// T = ceil(log2(n/N0)), reduced while the last slice would hold fewer than
// N0 users. Phase i uses the users with 1-based index in
// [ceil(n/2^i), ceil(n/2^(i-1))) at the full (eps, delta).
PhasedSchedule sco_schedule(const PhasedConfig& cfg, Index n, Index m,
                            Index d, double diameter);

// Localization over the full dataset. The caller is responsible for having
// permuted ds.
MechanismResult phased_erm(const LossPtr& loss, const UserDataset& ds,
                           const FeasibleRegion& K, const PhasedConfig& cfg,
                           RandomSource& rng);

// Localization over disjoint user slices.
MechanismResult phased_sco(const LossPtr& loss, const UserDataset& ds,
                           const FeasibleRegion& K, const PhasedConfig& cfg,
                           RandomSource& rng);

// Constants of the two-stage strongly convex reductions.
struct ReductionPlan {
  bool sco = false;
  double beta = 0;
  double mu = 0;
  double stage1_target = 0;  // Delta of the stage-1 output perturbation
  double stage1_sigma = 0;   // sigma(eps/2, delta/2, beta, G, mu)
  double radius = 0;         // R'
  // lambda = G sqrt(d) / (R' n sqrt(m)).
  double lambda = 0;
};

ReductionPlan reduction_plan(bool sco, const PhasedConfig& cfg, double mu,
                             Index n, Index m, Index d);

// The budget and settings stage 2 runs with: (eps/2, delta/2), the plan's
// beta and lambda.
PhasedConfig stage2_config(const PhasedConfig& cfg, const ReductionPlan& plan);

MechanismResult strongly_convex_erm(const LossPtr& loss, const UserDataset& ds,
                                    const FeasibleRegion& K,
                                    const PhasedConfig& cfg, RandomSource& rng);

MechanismResult strongly_convex_sco(const LossPtr& loss, const UserDataset& ds,
                                    const FeasibleRegion& K,
                                    const PhasedConfig& cfg, RandomSource& rng);

}  // namespace userdp

#endif  // USERDP_PHASED_H_
