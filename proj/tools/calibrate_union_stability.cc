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

// Prints the 99.9th percentile of the normalized Delta-hat_1 statistic at
// the reference configuration; the value is frozen as kUnionStabilityConstant.

#include <cstdio>

#include "userdp/generators.h"
#include "userdp/stats.h"
#include "userdp/verify.h"

int main() {
  const double zeta = 0.5, G = 1, beta = 0.001;
  const userdp::UserDataset ds =
      userdp::two_cluster_dataset(20, 16, 2, G / (2 * zeta));
  userdp::RandomSource rng(20260101);
  const auto ratios =
      userdp::union_stability_ratios(ds, zeta, G, 1, 10000, beta, rng);
  std::printf("%.6g\n", userdp::percentile(ratios, 0.999));
  return 0;
}
