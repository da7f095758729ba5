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

#include "userdp/privacy.h"

#include <cmath>
#include <string>

#include "userdp/errors.h"

namespace userdp {

PrivacyParams::PrivacyParams(double eps_in, double delta_in)
    : eps(eps_in), delta(delta_in) {
  if (!(eps > 0 && eps <= 1)) {
    throw ArgumentError("eps must lie in (0, 1], got " + std::to_string(eps));
  }
  if (!(delta > 0 && delta <= 0.5)) {
    throw ArgumentError("delta must lie in (0, 1/2], got " +
                        std::to_string(delta));
  }
}

int tdlap_kappa(double eps, double delta) {
  if (!(eps > 0) || !(delta > 0) || !(delta < 1)) {
    throw ArgumentError("tdlap_kappa needs eps > 0 and delta in (0, 1)");
  }
  const double q = std::log(1 / delta) / eps;
  const double nearest = std::round(q);
  const double c =
      std::abs(q - nearest) <= 1e-12 * std::max(1.0, q) ? nearest : std::ceil(q);
  if (c > 1e8) throw ArgumentError("kappa too large");
  return 1 + static_cast<int>(c);
}

OutputPertConstants output_pert_constants(double eps, double delta) {
  OutputPertConstants c;
  c.eps_bar = eps / 2;
  c.delta_bar = delta / (std::exp(c.eps_bar) + 2);
  c.kappa = tdlap_kappa(c.eps_bar, c.delta_bar);
  return c;
}

double output_pert_sigma(const OutputPertConstants& c, double target) {
  return 2 * std::sqrt(std::log(2 / c.delta_bar)) * (8 * c.kappa * target) /
         c.eps_bar;
}

}  // namespace userdp
