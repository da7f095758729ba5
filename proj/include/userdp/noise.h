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

#ifndef USERDP_NOISE_H_
#define USERDP_NOISE_H_

#include <limits>
#include <vector>

#include "userdp/dataset.h"
#include "userdp/random.h"

namespace userdp {

// Shifted truncated discrete Laplace on {0, ..., 2 kappa}, pmf proportional
// to exp(-eps |x - kappa|).
class TDLap {
 public:
  TDLap(double eps, double delta);

  double eps() const { return eps_; }
  double delta() const { return delta_; }
  int kappa() const { return kappa_; }
  int support_max() const { return 2 * kappa_; }

  double pmf(int x) const;
  const std::vector<double>& pmf_table() const { return pmf_; }

  // Inverse CDF on one uniform draw.
  int sample(RandomSource& rng) const;

 private:
  double eps_;
  double delta_;
  int kappa_;
  std::vector<double> pmf_;
  std::vector<long double> cdf_;
};

// d i.i.d. N(0, sigma^2) coordinates via Box-Muller. Always consumes
// 2 * ceil(d / 2) uniforms.
Vector gaussian_vector(Index d, double sigma, RandomSource& rng);

struct TruncatedGaussianSpec {
  Vector chi;
  double sigma = 1;
  double B = std::numeric_limits<double>::infinity();
};

// Z' ~ N(chi, sigma^2 I); returns Z' if |Z'| <= B, else zero.
Vector truncated_gaussian_sample(const TruncatedGaussianSpec& spec,
                                 RandomSource& rng);

// E[Z] for the truncated law, by one-dimensional quadrature.
Vector truncated_gaussian_mean(const TruncatedGaussianSpec& spec);

}  // namespace userdp

#endif  // USERDP_NOISE_H_
