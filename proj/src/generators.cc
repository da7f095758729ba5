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

#include "userdp/generators.h"

#include "userdp/errors.h"

namespace userdp {

UserDataset trunc_gauss_dataset(const TruncatedGaussianSpec& spec, Index n,
                                Index m, RandomSource& rng) {
  if (n < 1 || m < 1) throw ArgumentError("need n, m >= 1");
  ItemMatrix items(n * m, spec.chi.size());
  for (Index k = 0; k < n * m; ++k)
    items.row(k) = truncated_gaussian_sample(spec, rng).transpose();
  return UserDataset(std::move(items), n, m);
}

UserDataset two_cluster_dataset(Index n, Index m, Index d, double a) {
  if (n < 1 || m < 1 || d < 1) throw ArgumentError("need n, m, d >= 1");
  ItemMatrix items = ItemMatrix::Zero(n * m, d);
  const Index half = (n * m) / 2;
  for (Index k = 0; k < n * m; ++k) items(k, 0) = k < half ? a : -a;
  return UserDataset(std::move(items), n, m);
}

UserDataset identical_dataset(Index n, Index m, const Vector& value) {
  if (n < 1 || m < 1 || value.size() < 1)
    throw ArgumentError("need n, m, d >= 1");
  ItemMatrix items = value.transpose().replicate(n * m, 1);
  return UserDataset(std::move(items), n, m);
}

}  // namespace userdp
