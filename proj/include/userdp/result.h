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

#ifndef USERDP_RESULT_H_
#define USERDP_RESULT_H_

#include <optional>
#include <string>
#include <vector>

#include "userdp/dataset.h"

namespace userdp {

// What one phase of a localization run did.
struct PhaseTrace {
  int index = 0;  // 1-based
  double lambda = 0;
  double radius = 0;
  Vector center;  // theta_{i-1}
  bool bottom = false;
  std::optional<Vector> output;
};

// Audit metadata attached to every mechanism outcome.
struct MechanismTrace {
  bool non_private = false;
  int kappa = 0;
  int r1 = -1;
  double sigma = 0;
  double target_sensitivity = 0;
  std::vector<Index> removed;
  bool certified = false;
  bool budget_exhausted = false;
  std::optional<Vector> center;       // f(x_{-S}), before noise
  std::optional<Vector> unprojected;  // center + noise
  bool projected = false;             // final projection moved the point
  std::string stage;                  // "stage1", "stage2" for reductions
  std::optional<Vector> stage1_output;  // theta_0 of a reduction
  std::optional<int> failed_phase;
  std::vector<PhaseTrace> phases;
  std::vector<std::string> warnings;
};

// Either a released vector or Bottom.
class MechanismResult {
 public:
  static MechanismResult released(Vector theta, MechanismTrace trace) {
    return MechanismResult(std::move(theta), std::move(trace));
  }
  static MechanismResult bottom(MechanismTrace trace) {
    return MechanismResult(std::nullopt, std::move(trace));
  }

  bool is_bottom() const { return !theta_.has_value(); }
  // Throws std::bad_optional_access on Bottom.
  const Vector& theta() const { return theta_.value(); }
  const MechanismTrace& trace() const { return trace_; }
  MechanismTrace& mutable_trace() { return trace_; }

 private:
  MechanismResult(std::optional<Vector> theta, MechanismTrace trace)
      : theta_(std::move(theta)), trace_(std::move(trace)) {}

  std::optional<Vector> theta_;
  MechanismTrace trace_;
};

}  // namespace userdp

#endif  // USERDP_RESULT_H_
