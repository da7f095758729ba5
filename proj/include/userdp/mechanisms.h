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

#ifndef USERDP_MECHANISMS_H_
#define USERDP_MECHANISMS_H_

#include "userdp/dataset.h"
#include "userdp/privacy.h"
#include "userdp/random.h"
#include "userdp/region.h"
#include "userdp/result.h"
#include "userdp/sensitivity.h"
#include "userdp/solvers.h"

namespace userdp {

struct DelOutputPertConfig {
  DelOutputPertConfig(PrivacyParams p, double target,
                      ProbeMode m = ProbeMode::kCertificate)
      : privacy(p), target_sensitivity(target), mode(m) {}

  PrivacyParams privacy;
  double target_sensitivity;
  ProbeMode mode;
  double enumeration_budget = kDefaultEnumerationBudget;
  // Skips the stability test and the noise. Not private.
  bool non_private = false;

  OutputPertConstants constants() const {
    return output_pert_constants(privacy);
  }
  double sigma() const {
    return output_pert_sigma(constants(), target_sensitivity);
  }
};

// Deletion-sensitivity output perturbation on an n-user dataset whose map
// values lie in R^d. Requires n > 4 kappa + 2. If region is given the
// released point is projected onto it.
MechanismResult del_output_pert(const SubsetMap& f, Index n,
                                const DelOutputPertConfig& cfg,
                                RandomSource& rng,
                                const Certifier& certifier = {},
                                const FeasibleRegion* region = nullptr);

MechanismResult del_output_pert(const DatasetMap& f, const UserDataset& ds,
                                const DelOutputPertConfig& cfg,
                                RandomSource& rng);

struct SCOutputPertConfig {
  SCOutputPertConfig(PrivacyParams p, double beta_in, double G_in,
                     double mu_in)
      : privacy(p), beta(beta_in), G(G_in), mu(mu_in) {}

  PrivacyParams privacy;
  double beta;
  double G;
  double mu;
  ProbeMode mode = ProbeMode::kCertificate;
  double enumeration_budget = kDefaultEnumerationBudget;
  long max_iters = 200000;
  bool non_private = false;
  // n below threshold_C * ln(1/delta) / eps draws a warning.
  double threshold_C = 10;

  // 10 G sqrt(ln(1/beta)) / (mu n sqrt(m)).
  double target_sensitivity(Index n, Index m) const;
};

// Output perturbation of the constrained ERM minimizer map.
MechanismResult sc_output_pert(const RegularizedObjective& obj,
                               const UserDataset& ds,
                               const FeasibleRegion& region,
                               const SCOutputPertConfig& cfg,
                               RandomSource& rng);

inline MechanismResult sc_output_pert(const LossPtr& loss,
                                      const UserDataset& ds,
                                      const FeasibleRegion& region,
                                      const SCOutputPertConfig& cfg,
                                      RandomSource& rng) {
  return sc_output_pert(RegularizedObjective(loss), ds, region, cfg, rng);
}

}  // namespace userdp

#endif  // USERDP_MECHANISMS_H_
