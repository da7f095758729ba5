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

#include "userdp/loss.h"

#include <cmath>

#include "userdp/errors.h"

namespace userdp {

LossModel::LossModel(double G, double mu) : G_(G), mu_(mu) {
  if (!(G > 0) || !std::isfinite(G)) throw ArgumentError("G must be positive");
  if (!(mu >= 0) || !std::isfinite(mu)) throw ArgumentError("mu must be >= 0");
}

double LossModel::sum_value(const Vector& theta, const ItemBlock& rows) const {
  double total = 0;
  for (Index k = 0; k < rows.rows(); ++k) total += value(theta, rows.row(k));
  return total;
}

Vector LossModel::sum_subgradient(const Vector& theta,
                                  const ItemBlock& rows) const {
  Vector total = Vector::Zero(theta.size());
  for (Index k = 0; k < rows.rows(); ++k)
    total += subgradient(theta, rows.row(k));
  return total;
}

std::optional<Vector> LossModel::closed_form_minimizer(
    const UserDataset&, const Vector&, double, const FeasibleRegion&) const {
  return std::nullopt;
}

namespace {

class SquaredLoss final : public LossModel {
 public:
  SquaredLoss(double zeta, double G) : LossModel(G, 2 * zeta), zeta_(zeta) {
    if (!(zeta > 0)) throw ArgumentError("zeta must be positive");
  }

  std::string name() const override { return "squared"; }

  double value(const Vector& theta, ItemRow x) const override {
    return zeta_ * (theta - x.transpose()).squaredNorm();
  }
  Vector subgradient(const Vector& theta, ItemRow x) const override {
    return 2 * zeta_ * (theta - x.transpose());
  }
  Vector sum_subgradient(const Vector& theta,
                         const ItemBlock& rows) const override {
    return 2 * zeta_ *
           (static_cast<double>(rows.rows()) * theta -
            rows.colwise().sum().transpose());
  }

  // The objective is (zeta + weight/2)|theta - z|^2 + const, isotropic, so
  // projecting z gives the constrained minimizer.
  std::optional<Vector> closed_form_minimizer(
      const UserDataset& ds, const Vector& center, double weight,
      const FeasibleRegion& region) const override {
    Vector z = ds.mean();
    if (weight > 0) z = (2 * zeta_ * z + weight * center) / (2 * zeta_ + weight);
    return region.project(z);
  }

 private:
  double zeta_;
};

class LogisticLoss final : public LossModel {
 public:
  LogisticLoss(double rho, double G) : LossModel(G, rho), rho_(rho) {}

  std::string name() const override { return "logistic"; }

  double value(const Vector& theta, ItemRow x) const override {
    const double z = x.dot(theta.transpose());
    const double l = z > 0 ? std::log1p(std::exp(-z)) : -z + std::log1p(std::exp(z));
    return l + 0.5 * rho_ * theta.squaredNorm();
  }
  Vector subgradient(const Vector& theta, ItemRow x) const override {
    const double z = x.dot(theta.transpose());
    const double s = 1 / (1 + std::exp(z));  // sigmoid(-z)
    return -s * x.transpose() + rho_ * theta;
  }

 private:
  double rho_;
};

class HingeLoss final : public LossModel {
 public:
  HingeLoss(double rho, double G) : LossModel(G, rho), rho_(rho) {}

  std::string name() const override { return "hinge"; }

  double value(const Vector& theta, ItemRow x) const override {
    const double z = x.dot(theta.transpose());
    return std::max(0.0, 1 - z) + 0.5 * rho_ * theta.squaredNorm();
  }
  Vector subgradient(const Vector& theta, ItemRow x) const override {
    const double z = x.dot(theta.transpose());
    Vector g = rho_ * theta;
    if (z < 1) g -= x.transpose();
    return g;
  }

 private:
  double rho_;
};

class DistanceLoss final : public LossModel {
 public:
  DistanceLoss() : LossModel(1, 0) {}

  std::string name() const override { return "distance"; }

  double value(const Vector& theta, ItemRow x) const override {
    return (theta - x.transpose()).norm();
  }
  Vector subgradient(const Vector& theta, ItemRow x) const override {
    Vector diff = theta - x.transpose();
    const double n = diff.norm();
    if (n == 0) return Vector::Zero(theta.size());
    return diff / n;
  }
};

}  // namespace

LossPtr make_squared_loss(double zeta, double G) {
  return std::make_shared<SquaredLoss>(zeta, G);
}
LossPtr make_logistic_loss(double rho, double G) {
  return std::make_shared<LogisticLoss>(rho, G);
}
LossPtr make_hinge_loss(double rho, double G) {
  return std::make_shared<HingeLoss>(rho, G);
}
LossPtr make_distance_loss() { return std::make_shared<DistanceLoss>(); }

double empirical_loss(const LossModel& loss, const UserDataset& ds,
                      const Vector& theta) {
  return loss.sum_value(theta, ds.items()) /
         static_cast<double>(ds.num_items());
}

}  // namespace userdp
