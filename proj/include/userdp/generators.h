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

#ifndef USERDP_GENERATORS_H_
#define USERDP_GENERATORS_H_

#include "userdp/dataset.h"
#include "userdp/noise.h"
#include "userdp/random.h"

namespace userdp {

// Items drawn i.i.d. from the truncated Gaussian.
UserDataset trunc_gauss_dataset(const TruncatedGaussianSpec& spec, Index n,
                                Index m, RandomSource& rng);

// First half of the pooled items at +a e_1, the rest at -a e_1, assigned
// to users in order (user 0 gets the first m items). With a = G/(2 zeta)
// every squared-loss gradient at the pooled mean has norm G.
UserDataset two_cluster_dataset(Index n, Index m, Index d, double a);

// Every item equal to value.
UserDataset identical_dataset(Index n, Index m, const Vector& value);

}  // namespace userdp

#endif  // USERDP_GENERATORS_H_
