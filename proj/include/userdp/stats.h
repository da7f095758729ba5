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

#ifndef USERDP_STATS_H_
#define USERDP_STATS_H_

#include <vector>

namespace userdp {

// A binomial proportion with its Wilson score interval.
struct ProportionEstimate {
  long successes = 0;
  long trials = 0;
  double estimate = 0;
  double lower = 0;
  double upper = 0;
};

inline constexpr double kZ95 = 1.959963984540054;

ProportionEstimate wilson_interval(long successes, long trials,
                                   double z = kZ95);

double mean(const std::vector<double>& xs);
// Standard error of the mean (sample standard deviation / sqrt(n)); 0 for a
// single value.
double standard_error(const std::vector<double>& xs);
// Linear interpolation between order statistics, q in [0, 1].
double percentile(std::vector<double> xs, double q);

}  // namespace userdp

#endif  // USERDP_STATS_H_
