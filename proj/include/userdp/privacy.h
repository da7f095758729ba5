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

#ifndef USERDP_PRIVACY_H_
#define USERDP_PRIVACY_H_

namespace userdp {

// An (eps, delta) budget. The public constructor enforces the standing
// range eps in (0, 1], delta in (0, 1/2].
struct PrivacyParams {
  PrivacyParams(double eps, double delta);

  double eps;
  double delta;
};

// kappa(eps, delta) = 1 + ceil(ln(1/delta) / eps). A quotient within 1e-12
// (relative) of an integer is treated as that integer so that, e.g.,
// delta = exp(-2) at eps = 1 yields kappa = 3 despite rounding in exp/log.
int tdlap_kappa(double eps, double delta);

// Constants the output-perturbation mechanism derives from its budget.
struct OutputPertConstants {
  double eps_bar;    // eps / 2
  double delta_bar;  // delta / (e^{eps_bar} + 2)
  int kappa;         // tdlap_kappa(eps_bar, delta_bar)
};

OutputPertConstants output_pert_constants(double eps, double delta);
inline OutputPertConstants output_pert_constants(const PrivacyParams& p) {
  return output_pert_constants(p.eps, p.delta);
}

// sigma = 2 sqrt(ln(2/delta_bar)) * 8 kappa Delta / eps_bar.
double output_pert_sigma(const OutputPertConstants& c, double target);

}  // namespace userdp

#endif  // USERDP_PRIVACY_H_
