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

#ifndef USERDP_REGION_H_
#define USERDP_REGION_H_

#include <limits>
#include <vector>

#include "userdp/dataset.h"

namespace userdp {

inline constexpr double kProjectionTol = 1e-9;
inline constexpr int kMaxProjectionIters = 10000;

// Closed L2 ball. radius may be +infinity.
struct Ball {
  Vector center;
  double radius = std::numeric_limits<double>::infinity();
};

Vector project_to_ball(const Vector& theta, const Ball& ball);

// Intersection of L2 balls. The first ball is the base region K; further
// balls are localization caps added by intersect().
class FeasibleRegion {
 public:
  explicit FeasibleRegion(Ball base);
  static FeasibleRegion unbounded(Index d);
  static FeasibleRegion ball(Vector center, double radius);

  // Throws ArgumentError when the result would be empty.
  FeasibleRegion intersect(Ball cap) const;

  const std::vector<Ball>& balls() const { return balls_; }
  Index dim() const { return balls_.front().center.size(); }

  // 2 * smallest radius: an upper bound on the true diameter.
  double diameter() const;
  bool bounded() const;

  bool contains(const Vector& theta, double tol = 1e-8) const;

  // Euclidean projection. One ball: closed form. Several: tries each
  // single-ball projection, then falls back to Dykstra's method.
  Vector project(const Vector& theta) const;

  // Some point of the region.
  Vector anchor() const { return project(balls_.front().center); }

 private:
  std::vector<Ball> balls_;
};

}  // namespace userdp

#endif  // USERDP_REGION_H_
