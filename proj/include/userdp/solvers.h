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

#ifndef USERDP_SOLVERS_H_
#define USERDP_SOLVERS_H_

#include "userdp/dataset.h"
#include "userdp/loss.h"
#include "userdp/region.h"

namespace userdp {

struct SolverConfig {
  // Target accuracy in parameter distance.
  double tol_param = 1e-8;
  long max_iters = 200000;
  // Set false to force the iterative path even when a formula exists.
  bool use_closed_form = true;
};

// l(theta; x) + (weight/2)|theta - center|^2.
class RegularizedObjective {
 public:
  explicit RegularizedObjective(LossPtr base);
  RegularizedObjective(LossPtr base, Vector center, double weight);

  const LossModel& base() const { return *base_; }
  const LossPtr& base_ptr() const { return base_; }
  const Vector& center() const { return center_; }
  double weight() const { return weight_; }

  double strong_convexity() const {
    return base_->strong_convexity() + weight_;
  }

  // Mean over items, plus the regularizer.
  double value(const UserDataset& ds, const Vector& theta) const;

 private:
  LossPtr base_;
  Vector center_;
  double weight_;
};

// (1/(nm)) sum_{i,j} subgradient(theta, x_ij) + weight (theta - center).
Vector gradient_at(const RegularizedObjective& obj, const UserDataset& ds,
                   const Vector& theta);

// (1/m) sum_j subgradient(theta, x_ij) + weight (theta - center).
Vector per_user_gradient(const RegularizedObjective& obj, const UserDataset& ds,
                         const Vector& theta, Index i);

// All per-user gradients as columns of a d x n matrix.
Eigen::MatrixXd per_user_gradients(const RegularizedObjective& obj,
                                   const UserDataset& ds, const Vector& theta);

// Upper bound on the gap F(theta) - min_K F from the strong-convexity lower
// model at theta with subgradient g. Never negative.
double suboptimality_bound(const Vector& theta, const Vector& g, double mu,
                           const FeasibleRegion& region);

// Constrained minimizer within cfg.tol_param of the exact one.
Vector erm_minimize(const RegularizedObjective& obj, const UserDataset& ds,
                    const FeasibleRegion& region, const SolverConfig& cfg);

}  // namespace userdp

#endif  // USERDP_SOLVERS_H_
