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

#ifndef USERDP_SENSITIVITY_H_
#define USERDP_SENSITIVITY_H_

#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <unordered_map>
#include <vector>

#include "userdp/dataset.h"
#include "userdp/region.h"
#include "userdp/solvers.h"

namespace userdp {

inline constexpr double kDefaultEnumerationBudget = 1e6;

using DatasetMap = std::function<Vector(const UserDataset&)>;

// f(x_{-U}) as a function of the sorted removed set U. Lets callers supply
// fast incremental evaluations (e.g. the mean from per-user sums).
using SubsetMap = std::function<Vector(const std::vector<Index>& removed)>;

SubsetMap subset_map(DatasetMap f, const UserDataset& ds);

// The mean map evaluated from precomputed per-user sums.
SubsetMap mean_subset_map(const UserDataset& ds);

// The exact constrained ERM minimizer map, x_{-U} -> argmin_K.
DatasetMap minimizer_map(RegularizedObjective obj, FeasibleRegion region,
                         SolverConfig cfg);

// sum_{s <= r} C(n, s), in floating point.
double subset_count(Index n, int r);

// Memoized evaluations of f over the deletion lattice of an n-user dataset.
class DeletionLattice {
 public:
  DeletionLattice(SubsetMap f, Index n);

  Index num_users() const { return n_; }

  const Vector& value(const std::vector<Index>& removed);

  // Local deletion sensitivity of f at x_{-removed}. A single remaining
  // user counts as 0: there is no further deletion that leaves a dataset.
  double delsen(const std::vector<Index>& removed);

  // max over T among the survivors with |T| <= r of delsen(removed + T);
  // r is clamped to (survivors - 2). Stops as soon as the running maximum
  // exceeds stop_above. Every delsen call is charged to the subset counter.
  double delsen_r(const std::vector<Index>& removed, int r,
                  double stop_above = std::numeric_limits<double>::infinity());

  long subsets_visited() const { return subsets_; }
  // Throws CapabilityError once subsets_visited() would pass the limit.
  void set_subset_limit(double limit) { limit_ = limit; }

 private:
  SubsetMap f_;
  Index n_;
  std::unordered_map<std::vector<bool>, Vector> cache_;
  long subsets_ = 0;
  double limit_ = std::numeric_limits<double>::infinity();
};

// max_i |f(x) - f(x_{-i})|. Needs n >= 2.
double delsen_exact(const DatasetMap& f, const UserDataset& ds);

// Exhaustive Delta-hat_r. Needs r + 1 < n and sum_{s<=r} C(n,s) <= budget.
double delsen_r_exact(const DatasetMap& f, const UserDataset& ds, int r,
                      double budget = kDefaultEnumerationBudget);
double delsen_r_exact(const SubsetMap& f, Index n, int r,
                      double budget = kDefaultEnumerationBudget);

// Gradient certificate for the ERM minimizer map.
//
// With per-user gradients g_i at the computed minimizer, their mean gbar,
// gamma = max |g_i - gbar|, e_s = s gamma / (n - s) and the first-order
// residual G1 = max_{y in K} <gbar, theta - y> - (mu/2)|y - theta|^2,
//   D(s) = (e_s + sqrt(e_s^2 + 2 mu G1)) / mu
// bounds |theta*(x_{-S}) - theta| for |S| = s, and bound = D(r) + D(r+1).
// At an exact unconstrained minimizer G1 = 0 and this is
// 2 r gamma / (mu (n - r)) + 2 (r + 1) gamma / (mu (n - r - 1)).
struct Certificate {
  double bound = 0;
  double gamma = 0;             // centered
  double gamma_uncentered = 0;  // max |g_i|
  double residual = 0;          // G1
  double mu = 0;
  Vector minimizer;
};

double certificate_bound(Index n, int r, double mu, double gamma,
                         double residual = 0);

// Needs r + 1 <= n / 2 and a strongly convex objective. A precomputed
// minimizer (any point of the region) may be passed to skip the solve.
Certificate delsen_certificate(const RegularizedObjective& obj,
                               const UserDataset& ds,
                               const FeasibleRegion& region, int r,
                               const SolverConfig& cfg,
                               const Vector* minimizer = nullptr);

enum class ProbeMode { kExhaustive, kCertificate };

// Upper bound on Delta-hat_r f(x) for the full dataset, or nothing when the
// certificate does not apply.
using Certifier = std::function<std::optional<double>(int r)>;

struct ProbeResult {
  bool found = false;
  std::vector<Index> removed;
  bool certified = false;        // S = {} accepted via the certificate
  bool budget_exhausted = false; // certificate mode gave up
};

// Smallest S (lexicographic among equal sizes), |S| <= r1 and |S| < n, with
// Delta-hat_{4 kappa - |S|} f(x_{-S}) <= target.
//
// Certificate mode first tries the certificate for S = {}; if it does not
// settle the question it runs the exact search, and reports nothing (with
// budget_exhausted set) if that search passes the budget. Exhaustive mode
// throws CapabilityError instead.
ProbeResult stable_set_probe(const SubsetMap& f, Index n, int r1, int kappa,
                             double target, ProbeMode mode,
                             const Certifier& certifier = {},
                             double budget = kDefaultEnumerationBudget);

struct SensitivityReport {
  double delsen = 0;
  std::map<int, double> delsen_r;
  ProbeMode method = ProbeMode::kExhaustive;
  std::optional<double> gamma;
};

// Exhaustive report for r = 0..max_r, or certificate bounds for r = 0..max_r
// (delsen then holds the r = 0 bound).
SensitivityReport sensitivity_report(const RegularizedObjective& obj,
                                     const UserDataset& ds,
                                     const FeasibleRegion& region, int max_r,
                                     ProbeMode mode, const SolverConfig& cfg,
                                     double budget = kDefaultEnumerationBudget);

}  // namespace userdp

#endif  // USERDP_SENSITIVITY_H_
