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

#include "userdp/mechanisms.h"

#include <cmath>
#include <string>

#include "userdp/errors.h"
#include "userdp/noise.h"

namespace userdp {

MechanismResult del_output_pert(const SubsetMap& f, Index n,
                                const DelOutputPertConfig& cfg,
                                RandomSource& rng, const Certifier& certifier,
                                const FeasibleRegion* region) {
  MechanismTrace trace;
  trace.target_sensitivity = cfg.target_sensitivity;
  if (cfg.non_private) {
    trace.non_private = true;
    Vector center = f({});
    trace.center = center;
    trace.unprojected = center;
    Vector theta = region ? region->project(center) : center;
    trace.projected = region && theta != center;
    return MechanismResult::released(std::move(theta), std::move(trace));
  }

  if (!(cfg.target_sensitivity >= 0))
    throw ArgumentError("target sensitivity must be >= 0");
  const OutputPertConstants c = cfg.constants();
  trace.kappa = c.kappa;
  if (n <= 4 * static_cast<Index>(c.kappa) + 2) {
    throw ConfigError("del_output_pert needs n > 4 kappa + 2 = " +
                      std::to_string(4 * c.kappa + 2) + ", got n = " +
                      std::to_string(n));
  }
  trace.sigma = output_pert_sigma(c, cfg.target_sensitivity);

  const TDLap tdlap(c.eps_bar, c.delta_bar);
  trace.r1 = tdlap.sample(rng);
  const ProbeResult probe =
      stable_set_probe(f, n, trace.r1, c.kappa, cfg.target_sensitivity,
                       cfg.mode, certifier, cfg.enumeration_budget);
  trace.certified = probe.certified;
  trace.budget_exhausted = probe.budget_exhausted;
  if (!probe.found) return MechanismResult::bottom(std::move(trace));

  trace.removed = probe.removed;
  Vector center = f(probe.removed);
  Vector noisy = center + gaussian_vector(center.size(), trace.sigma, rng);
  trace.center = std::move(center);
  trace.unprojected = noisy;
  Vector theta = region ? region->project(noisy) : noisy;
  trace.projected = region && theta != noisy;
  return MechanismResult::released(std::move(theta), std::move(trace));
}

MechanismResult del_output_pert(const DatasetMap& f, const UserDataset& ds,
                                const DelOutputPertConfig& cfg,
                                RandomSource& rng) {
  return del_output_pert(subset_map(f, ds), ds.num_users(), cfg, rng);
}

double SCOutputPertConfig::target_sensitivity(Index n, Index m) const {
  return 10 * G * std::sqrt(std::log(1 / beta)) /
         (mu * static_cast<double>(n) * std::sqrt(static_cast<double>(m)));
}

MechanismResult sc_output_pert(const RegularizedObjective& obj,
                               const UserDataset& ds,
                               const FeasibleRegion& region,
                               const SCOutputPertConfig& cfg,
                               RandomSource& rng) {
  if (!(cfg.mu > 0)) throw ConfigError("sc_output_pert needs mu > 0");
  if (!(cfg.G > 0)) throw ConfigError("sc_output_pert needs G > 0");
  if (!(cfg.beta > 0 && cfg.beta < 1))
    throw ArgumentError("beta must lie in (0, 1)");
  if (obj.strong_convexity() + 1e-12 * cfg.mu < cfg.mu)
    throw ConfigError("objective is less strongly convex than the config mu");

  const Index n = ds.num_users();
  const double target = cfg.target_sensitivity(n, ds.items_per_user());
  SolverConfig solver;
  solver.tol_param = target / 100;
  solver.max_iters = cfg.max_iters;

  std::vector<std::string> warnings;
  const double threshold =
      cfg.threshold_C * std::log(1 / cfg.privacy.delta) / cfg.privacy.eps;
  if (static_cast<double>(n) < threshold) {
    warnings.push_back("n = " + std::to_string(n) +
                       " is below C ln(1/delta)/eps = " +
                       std::to_string(threshold));
  }

  const Vector theta_hat = erm_minimize(obj, ds, region, solver);
  SubsetMap f = [&](const std::vector<Index>& removed) {
    if (removed.empty()) return theta_hat;
    return erm_minimize(obj, delete_users(ds, removed), region, solver);
  };
  Certifier certifier = [&](int r) -> std::optional<double> {
    if (2 * (r + 1) > n) return std::nullopt;
    return delsen_certificate(obj, ds, region, r, solver, &theta_hat).bound;
  };

  DelOutputPertConfig inner(cfg.privacy, target, cfg.mode);
  inner.enumeration_budget = cfg.enumeration_budget;
  inner.non_private = cfg.non_private;
  MechanismResult result =
      del_output_pert(f, n, inner, rng, certifier, &region);
  auto& w = result.mutable_trace().warnings;
  w.insert(w.end(), warnings.begin(), warnings.end());
  return result;
}

}  // namespace userdp
