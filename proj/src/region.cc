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

#include "userdp/region.h"

#include <algorithm>
#include <cmath>

#include "userdp/errors.h"

namespace userdp {

Vector project_to_ball(const Vector& theta, const Ball& ball) {
  if (!std::isfinite(ball.radius)) return theta;
  const Vector diff = theta - ball.center;
  const double dist = diff.norm();
  if (dist <= ball.radius) return theta;
  return ball.center + diff * (ball.radius / dist);
}

FeasibleRegion::FeasibleRegion(Ball base) {
  if (base.center.size() < 1) throw ArgumentError("region needs d >= 1");
  if (!(base.radius > 0)) throw ArgumentError("ball radius must be positive");
  if (!base.center.allFinite()) throw ArgumentError("ball center not finite");
  balls_.push_back(std::move(base));
}

FeasibleRegion FeasibleRegion::unbounded(Index d) {
  return FeasibleRegion(Ball{Vector::Zero(d)});
}

FeasibleRegion FeasibleRegion::ball(Vector center, double radius) {
  return FeasibleRegion(Ball{std::move(center), radius});
}

FeasibleRegion FeasibleRegion::intersect(Ball cap) const {
  if (cap.center.size() != dim()) throw ArgumentError("cap dimension mismatch");
  if (!(cap.radius > 0)) throw ArgumentError("ball radius must be positive");
  if (!cap.center.allFinite()) throw ArgumentError("ball center not finite");
  const Vector nearest = project(cap.center);
  if ((nearest - cap.center).norm() > cap.radius + kProjectionTol) {
    throw ArgumentError("intersection with cap is empty");
  }
  FeasibleRegion out = *this;
  out.balls_.push_back(std::move(cap));
  return out;
}

double FeasibleRegion::diameter() const {
  double r = std::numeric_limits<double>::infinity();
  for (const Ball& b : balls_) r = std::min(r, b.radius);
  return 2 * r;
}

bool FeasibleRegion::bounded() const { return std::isfinite(diameter()); }

bool FeasibleRegion::contains(const Vector& theta, double tol) const {
  for (const Ball& b : balls_) {
    if (std::isfinite(b.radius) && (theta - b.center).norm() > b.radius + tol)
      return false;
  }
  return true;
}

Vector FeasibleRegion::project(const Vector& theta) const {
  if (balls_.size() == 1) return project_to_ball(theta, balls_.front());
  if (contains(theta, 0.0)) return theta;
  // If the projection onto one ball already lies in the others it is the
  // projection onto the intersection.
  for (const Ball& b : balls_) {
    Vector p = project_to_ball(theta, b);
    if (contains(p, kProjectionTol)) return p;
  }
  const std::size_t k = balls_.size();
  std::vector<Vector> incr(k, Vector::Zero(theta.size()));
  Vector x = theta;
  for (int it = 0; it < kMaxProjectionIters; ++it) {
    const Vector before = x;
    for (std::size_t j = 0; j < k; ++j) {
      const Vector y = x + incr[j];
      x = project_to_ball(y, balls_[j]);
      incr[j] = y - x;
    }
    if ((x - before).norm() <= kProjectionTol && contains(x, kProjectionTol))
      break;
  }
  return x;
}

}  // namespace userdp
