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

#ifndef USERDP_VERIFY_H_
#define USERDP_VERIFY_H_

#include <functional>
#include <string>
#include <vector>

#include "userdp/dataset.h"
#include "userdp/loss.h"
#include "userdp/noise.h"
#include "userdp/phased.h"
#include "userdp/random.h"
#include "userdp/sensitivity.h"
#include "userdp/stats.h"

namespace userdp {

// Exceedance counts of a Monte-Carlo check, plus the largest observed
// statistic/bound ratio.
struct TrialReport {
  ProportionEstimate exceed;
  double max_ratio = 0;
};

// 5 G sqrt(m ln(1/beta)).
double permutation_sum_threshold(double G, Index m, double beta);

// vectors: N rows summing to zero, norms <= G. Each trial draws a uniform
// permutation and tests the norm of the sum of its first m entries.
TrialReport permutation_concentration_trial(const Eigen::MatrixXd& vectors,
                                            Index m, double G, long trials,
                                            double beta, RandomSource& rng);

// 5 G sqrt(ln(1/beta)) / (mu (n - 1) sqrt(m)).
double deletion_stability_bound(double G, double mu, Index n, Index m,
                                double beta);

// Over random permutations x^pi: distance between the minimizers on x^pi
// and on x^pi without its last user, against the bound above.
TrialReport deletion_stability_trial(const LossPtr& loss, const UserDataset& ds,
                                     long trials, double beta,
                                     RandomSource& rng);

// 30 G sqrt(ln(2/beta)) / (mu sqrt(nm)).
double erm_closeness_bound(double G, double mu, Index n, Index m, double beta);

// Squared loss, unconstrained: theta*(x) is the sample mean and theta*(D)
// the truncated-Gaussian mean. Each draw is a fresh dataset.
TrialReport erm_closeness_trial(const TruncatedGaussianSpec& spec, double zeta,
                                double G, Index n, Index m, long draws,
                                double beta, RandomSource& rng);

// G sqrt(r ln n + ln(1/beta)) / (mu n sqrt(m)); the envelope is this times
// kUnionStabilityConstant.
double union_stability_scale(double G, double mu, Index n, Index m, int r,
                        double beta);

// 99.9th percentile of Delta-hat_1 theta*(x^pi) / union_stability_scale over
// 10^4 permutations of two_cluster_dataset(20, 16, 2, 1) with zeta = 1/2,
// G = 1, beta = 0.001. Regenerate with tools/calibrate_union_stability.
inline constexpr double kUnionStabilityConstant = 1.27293;

// Delta-hat_r of the mean map (the squared-loss minimizer) on random
// permutations of ds, against constant * union_stability_scale.
TrialReport union_stability_trial(const UserDataset& ds, double zeta, double G,
                             int r, long trials, double beta, double constant,
                             RandomSource& rng);

// Ratios Delta-hat_r theta*(x^pi) / union_stability_scale, one per trial.
std::vector<double> union_stability_ratios(const UserDataset& ds, double zeta,
                                      double G, int r, long trials,
                                      double beta, RandomSource& rng);

struct SoundnessReport {
  long instances = 0;
  long violations = 0;
  // Largest exact/certificate ratio seen (<= 1 when sound).
  double max_ratio = 0;
};

// Random squared-loss instances with n <= 8 and r <= 2 (plain, regularized
// and constrained): compares the certificate with exhaustive Delta-hat_r of
// the minimizer map.
SoundnessReport certificate_soundness_check(long instances, RandomSource& rng);

struct ScanResult {
  long datasets = 0;
  long pairs = 0;
  long checks = 0;
  long violations = 0;
};

// Exhaustive check of: a nonempty stable set at (x', r1) implies a
// nonempty stable set at (x, r1 + 1), for every pair of one-dimensional
// datasets with items on grid that differ in one user, n <= n_max,
// m <= m_max, every target in deltas and r1 in 0..4 kappa - 1.
ScanResult neighbor_stability_scan(
    const std::function<SubsetMap(const UserDataset&)>& make_map,
    const std::vector<double>& grid, Index n_max, Index m_max,
    const std::vector<double>& deltas, int kappa, double budget = 1e8);

struct AuditReport {
  long checked = 0;
  std::vector<std::string> mismatches;
  bool ok() const { return mismatches.empty(); }
};

// Recomputes every derived constant of a localization schedule from the
// config alone and lists disagreements.
AuditReport budget_audit(const PhasedSchedule& live, const PhasedConfig& cfg,
                         double diameter);

// Same for a strongly convex reduction plan and its stage-2 schedule.
AuditReport budget_audit(const ReductionPlan& live,
                         const PhasedSchedule& stage2, const PhasedConfig& cfg,
                         Index n, Index m, Index d);

}  // namespace userdp

#endif  // USERDP_VERIFY_H_
