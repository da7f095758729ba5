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

#include "userdp/solvers.h"

#include <cmath>
#include <limits>
#include <string>

#include "userdp/errors.h"

namespace userdp {

RegularizedObjective::RegularizedObjective(LossPtr base)
    : base_(std::move(base)), weight_(0) {
  if (!base_) throw ArgumentError("null loss");
}

RegularizedObjective::RegularizedObjective(LossPtr base, Vector center,
                                           double weight)
    : base_(std::move(base)), center_(std::move(center)), weight_(weight) {
  if (!base_) throw ArgumentError("null loss");
  if (!(weight >= 0) || !std::isfinite(weight))
    throw ArgumentError("regularizer weight must be finite and >= 0");
}

double RegularizedObjective::value(const UserDataset& ds,
                                   const Vector& theta) const {
  double v = empirical_loss(*base_, ds, theta);
  if (weight_ > 0) v += 0.5 * weight_ * (theta - center_).squaredNorm();
  return v;
}

Vector gradient_at(const RegularizedObjective& obj, const UserDataset& ds,
                   const Vector& theta) {
  Vector g = obj.base().sum_subgradient(theta, ds.items()) /
             static_cast<double>(ds.num_items());
  if (obj.weight() > 0) g += obj.weight() * (theta - obj.center());
  return g;
}

Vector per_user_gradient(const RegularizedObjective& obj, const UserDataset& ds,
                         const Vector& theta, Index i) {
  if (i < 0 || i >= ds.num_users())
    throw ArgumentError("per_user_gradient: user index out of range");
  Vector g = obj.base().sum_subgradient(theta, ds.user(i)) /
             static_cast<double>(ds.items_per_user());
  if (obj.weight() > 0) g += obj.weight() * (theta - obj.center());
  return g;
}

Eigen::MatrixXd per_user_gradients(const RegularizedObjective& obj,
                                   const UserDataset& ds, const Vector& theta) {
  Eigen::MatrixXd out(theta.size(), ds.num_users());
  for (Index i = 0; i < ds.num_users(); ++i)
    out.col(i) = per_user_gradient(obj, ds, theta, i);
  return out;
}

double suboptimality_bound(const Vector& theta, const Vector& g, double mu,
                           const FeasibleRegion& region) {
  const Vector y = region.project(theta - g / mu);
  const double gap = g.dot(theta - y) - 0.5 * mu * (y - theta).squaredNorm();
  return std::max(gap, 0.0);
}

namespace {

double distance_bound(const RegularizedObjective& obj, const UserDataset& ds,
                      const FeasibleRegion& region, const Vector& theta,
                      const Vector* grad) {
  const double mu = obj.strong_convexity();
  const Vector g = grad ? *grad : gradient_at(obj, ds, theta);
  return std::sqrt(2 * suboptimality_bound(theta, g, mu, region) / mu);
}

}  // namespace

Vector erm_minimize(const RegularizedObjective& obj, const UserDataset& ds,
                    const FeasibleRegion& region, const SolverConfig& cfg) {
  const double mu = obj.strong_convexity();
  if (!(mu > 0)) {
    throw ConfigError("erm_minimize needs a strongly convex objective (mu = " +
                      std::to_string(mu) + ")");
  }
  if (!(cfg.tol_param > 0)) throw ArgumentError("tol_param must be positive");
  if (region.dim() != ds.dim()) throw ArgumentError("region dimension mismatch");
  if (obj.weight() > 0 && obj.center().size() != ds.dim())
    throw ArgumentError("regularizer center dimension mismatch");

  if (cfg.use_closed_form) {
    if (auto closed = obj.base().closed_form_minimizer(ds, obj.center(),
                                                       obj.weight(), region))
      return *closed;
  }

  // Projected subgradient, step 2/(mu (t+1)), with a running average over
  // the iterates since the last power of two.
  Vector theta = region.project(ds.mean());
  Vector best = theta;
  double best_bound = std::numeric_limits<double>::infinity();
  Vector avg = theta;
  long avg_count = 1;
  long next_restart = 2;
  for (long t = 1; t <= cfg.max_iters; ++t) {
    const Vector g = gradient_at(obj, ds, theta);
    const double bound = distance_bound(obj, ds, region, theta, &g);
    if (bound < best_bound) {
      best_bound = bound;
      best = theta;
    }
    if (bound <= cfg.tol_param) return theta;
    if (t % 16 == 0 && avg_count > 1) {
      const double avg_bound = distance_bound(obj, ds, region, avg, nullptr);
      if (avg_bound < best_bound) {
        best_bound = avg_bound;
        best = avg;
      }
      if (avg_bound <= cfg.tol_param) return avg;
    }
    theta = region.project(theta - (2 / (mu * (t + 1))) * g);
    if (t + 1 == next_restart) {
      avg = theta;
      avg_count = 1;
      next_restart *= 2;
    } else {
      ++avg_count;
      avg += (theta - avg) / static_cast<double>(avg_count);
    }
  }
  throw SolverError("erm_minimize: no certificate within " +
                        std::to_string(cfg.max_iters) +
                        " iterations (best bound " +
                        std::to_string(best_bound) + ")",
                    best, best_bound);
}

}  // namespace userdp
