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

#ifndef USERDP_LOSS_H_
#define USERDP_LOSS_H_

#include <memory>
#include <optional>
#include <string>

#include "userdp/dataset.h"
#include "userdp/region.h"

namespace userdp {

using ItemRow = Eigen::Ref<const Eigen::RowVectorXd>;
using ItemBlock = Eigen::Ref<const ItemMatrix>;

// Convex per-item loss l(theta; x) with declared Lipschitz constant G and
// strong convexity mu (0 when merely convex).
class LossModel {
 public:
  LossModel(double G, double mu);
  virtual ~LossModel() = default;

  virtual std::string name() const = 0;

  double lipschitz() const { return G_; }
  double strong_convexity() const { return mu_; }

  virtual double value(const Vector& theta, ItemRow x) const = 0;
  virtual Vector subgradient(const Vector& theta, ItemRow x) const = 0;

  // Sums over the rows of a block. The defaults loop over value() and
  // subgradient().
  virtual double sum_value(const Vector& theta, const ItemBlock& rows) const;
  virtual Vector sum_subgradient(const Vector& theta,
                                 const ItemBlock& rows) const;

  // argmin over region of mean loss + (weight/2)|theta - center|^2, when a
  // formula exists.
  virtual std::optional<Vector> closed_form_minimizer(
      const UserDataset& ds, const Vector& center, double weight,
      const FeasibleRegion& region) const;

 private:
  double G_;
  double mu_;
};

using LossPtr = std::shared_ptr<const LossModel>;

// zeta |theta - x|^2. mu = 2 zeta; G must be supplied (it depends on the
// data and region diameter).
LossPtr make_squared_loss(double zeta, double G);

// log(1 + exp(-<theta, x>)) + (rho/2)|theta|^2, labels folded into x.
LossPtr make_logistic_loss(double rho, double G);

// max(0, 1 - <theta, x>) + (rho/2)|theta|^2.
LossPtr make_hinge_loss(double rho, double G);

// |theta - x|. Convex, 1-Lipschitz, not strongly convex.
LossPtr make_distance_loss();

// (1/(nm)) sum of the loss over every item.
double empirical_loss(const LossModel& loss, const UserDataset& ds,
                      const Vector& theta);

}  // namespace userdp

#endif  // USERDP_LOSS_H_
