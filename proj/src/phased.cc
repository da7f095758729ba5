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

#include "userdp/phased.h"

#include <cmath>
#include <string>

#include "userdp/errors.h"

namespace userdp {

std::string algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::kPhasedErm: return "phased-erm";
    case Algorithm::kPhasedSco: return "phased-sco";
    case Algorithm::kStronglyConvexErm: return "sc-erm";
    case Algorithm::kStronglyConvexSco: return "sc-sco";
  }
  return "unknown";
}

double default_lambda(double G, double R, Index d, Index n, Index m) {
  return G * std::sqrt(static_cast<double>(d)) /
         (R * static_cast<double>(n) * std::sqrt(static_cast<double>(m)));
}

int ceil_log2(double x) {
  if (!(x > 0) || !std::isfinite(x)) throw ArgumentError("ceil_log2: bad x");
  int T = 0;
  while (std::ldexp(1.0, T) < x) ++T;
  return T;
}

namespace {

void fill_phase_constants(PhaseSpec& p, double G, Index m) {
  p.radius = G / p.lambda;
  const OutputPertConstants c = output_pert_constants(p.eps, p.delta);
  p.kappa = c.kappa;
  const Index users = p.end_user - p.first_user;
  p.target_sensitivity = 10 * (2 * G) * std::sqrt(std::log(1 / p.beta)) /
                         (p.lambda * static_cast<double>(users) *
                          std::sqrt(static_cast<double>(m)));
  p.sigma = output_pert_sigma(c, p.target_sensitivity);
}

void resolve_defaults(const PhasedConfig& cfg, PhasedSchedule& s,
                      double diameter) {
  if (!(cfg.G > 0)) throw ConfigError("G must be positive");
  s.G = cfg.G;
  s.beta = cfg.beta.value_or(1.0 / static_cast<double>(s.n * s.m));
  if (!(s.beta > 0 && s.beta < 1)) throw ArgumentError("beta must lie in (0, 1)");
  s.lambda = cfg.lambda ? *cfg.lambda
                        : default_lambda(cfg.G, diameter, s.d, s.n, s.m);
  if (!(s.lambda > 0) || !std::isfinite(s.lambda)) {
    throw ConfigError("localization needs a bounded region or an explicit "
                      "lambda > 0");
  }
}

Index ceil_div_pow2(Index n, int i) {
  const Index p = Index{1} << i;
  return (n + p - 1) / p;
}

}  // namespace

PhasedSchedule erm_schedule(const PhasedConfig& cfg, Index n, Index m, Index d,
                            double diameter) {
  PhasedSchedule s;
  s.algorithm = Algorithm::kPhasedErm;
  s.n = n;
  s.m = m;
  s.d = d;
  resolve_defaults(cfg, s, diameter);
  s.T = ceil_log2(static_cast<double>(n * m));
  if (s.T < 1) throw ConfigError("Phased-ERM needs nm >= 2");
  s.eps_phase = cfg.privacy.eps / s.T;
  s.delta_phase = cfg.privacy.delta / s.T;
  s.beta_phase = s.beta / s.T;
  for (int i = 1; i <= s.T; ++i) {
    PhaseSpec p;
    p.index = i;
    p.eps = s.eps_phase;
    p.delta = s.delta_phase;
    p.beta = s.beta_phase;
    p.lambda = s.lambda * std::pow(4.0, i);
    p.first_user = 0;
    p.end_user = n;
    fill_phase_constants(p, cfg.G, m);
    s.phases.push_back(p);
  }
  return s;
}

PhasedSchedule sco_schedule(const PhasedConfig& cfg, Index n, Index m, Index d,
                            double diameter) {
  PhasedSchedule s;
  s.algorithm = Algorithm::kPhasedSco;
  s.n = n;
  s.m = m;
  s.d = d;
  resolve_defaults(cfg, s, diameter);
  s.N0 = cfg.threshold_C * std::log(1 / cfg.privacy.delta) / cfg.privacy.eps;
  if (static_cast<double>(n) < 2 * s.N0) {
    throw ConfigError("Phased-SCO needs n >= 2 N0 = " +
                      std::to_string(2 * s.N0) + ", got n = " +
                      std::to_string(n));
  }
  int T = ceil_log2(static_cast<double>(n) / s.N0);
  auto smallest_slice = [&](int t) {
    return ceil_div_pow2(n, t - 1) - ceil_div_pow2(n, t);
  };
  while (T > 0 && static_cast<double>(smallest_slice(T)) < s.N0) --T;
  if (T < 1) throw ConfigError("Phased-SCO: no slice holds N0 users");
  s.T = T;
  s.eps_phase = cfg.privacy.eps;
  s.delta_phase = cfg.privacy.delta;
  s.beta_phase = s.beta / T;
  for (int i = 1; i <= T; ++i) {
    PhaseSpec p;
    p.index = i;
    p.eps = s.eps_phase;
    p.delta = s.delta_phase;
    p.beta = s.beta_phase;
    p.lambda = s.lambda * std::pow(4.0, i);
    p.first_user = ceil_div_pow2(n, i) - 1;
    p.end_user = ceil_div_pow2(n, i - 1) - 1;
    if (static_cast<double>(p.end_user - p.first_user) < s.N0)
      throw ConfigError("Phased-SCO slice smaller than N0");
    fill_phase_constants(p, cfg.G, m);
    s.phases.push_back(p);
  }
  return s;
}

namespace {

template <typename Fn>
auto with_context(const std::string& where, Fn&& fn) {
  try {
    return fn();
  } catch (const SolverError& e) {
    throw SolverError(where + ": " + e.what(), e.best_iterate(), e.best_bound());
  } catch (const ConfigError& e) {
    throw ConfigError(where + ": " + e.what());
  } catch (const CapabilityError& e) {
    throw CapabilityError(where + ": " + e.what());
  } catch (const ArgumentError& e) {
    throw ArgumentError(where + ": " + e.what());
  }
}

MechanismResult run_schedule(const LossPtr& loss, const UserDataset& ds,
                             const FeasibleRegion& K, const PhasedSchedule& s,
                             const PhasedConfig& cfg, RandomSource& rng) {
  std::vector<std::string> warnings;
  const double threshold = cfg.threshold_C * std::log(1 / cfg.privacy.delta) *
                           std::max(1.0, std::log2(static_cast<double>(s.m))) /
                           cfg.privacy.eps;
  if (static_cast<double>(s.n) < threshold) {
    warnings.push_back("n = " + std::to_string(s.n) +
                       " is below the localization threshold " +
                       std::to_string(threshold));
  }
  Vector theta = K.anchor();
  std::vector<PhaseTrace> phases;
  MechanismTrace last;
  for (const PhaseSpec& p : s.phases) {
    const std::string where = "phase " + std::to_string(p.index);
    MechanismResult r = with_context(where, [&] {
      const FeasibleRegion Ki = K.intersect(Ball{theta, p.radius});
      const RegularizedObjective obj(loss, theta, p.lambda);
      SCOutputPertConfig sc(PrivacyParams(p.eps, p.delta), p.beta, 2 * s.G,
                            p.lambda);
      sc.mode = cfg.mode;
      sc.enumeration_budget = cfg.enumeration_budget;
      sc.max_iters = cfg.max_iters;
      sc.non_private = cfg.non_private;
      sc.threshold_C = cfg.threshold_C;
      if (p.first_user == 0 && p.end_user == ds.num_users())
        return sc_output_pert(obj, ds, Ki, sc, rng);
      return sc_output_pert(obj, user_range(ds, p.first_user, p.end_user), Ki,
                            sc, rng);
    });
    PhaseTrace pt;
    pt.index = p.index;
    pt.lambda = p.lambda;
    pt.radius = p.radius;
    pt.center = theta;
    pt.bottom = r.is_bottom();
    for (auto& w : r.trace().warnings) warnings.push_back(where + ": " + w);
    last = r.trace();
    if (r.is_bottom()) {
      phases.push_back(std::move(pt));
      last.failed_phase = p.index;
      last.phases = std::move(phases);
      last.warnings = std::move(warnings);
      return MechanismResult::bottom(std::move(last));
    }
    theta = r.theta();
    pt.output = theta;
    phases.push_back(std::move(pt));
  }
  last.phases = std::move(phases);
  last.warnings = std::move(warnings);
  return MechanismResult::released(std::move(theta), std::move(last));
}

}  // namespace

MechanismResult phased_erm(const LossPtr& loss, const UserDataset& ds,
                           const FeasibleRegion& K, const PhasedConfig& cfg,
                           RandomSource& rng) {
  const PhasedSchedule s = erm_schedule(cfg, ds.num_users(),
                                        ds.items_per_user(), ds.dim(),
                                        K.diameter());
  return run_schedule(loss, ds, K, s, cfg, rng);
}

MechanismResult phased_sco(const LossPtr& loss, const UserDataset& ds,
                           const FeasibleRegion& K, const PhasedConfig& cfg,
                           RandomSource& rng) {
  const PhasedSchedule s = sco_schedule(cfg, ds.num_users(),
                                        ds.items_per_user(), ds.dim(),
                                        K.diameter());
  return run_schedule(loss, ds, K, s, cfg, rng);
}

ReductionPlan reduction_plan(bool sco, const PhasedConfig& cfg, double mu,
                             Index n, Index m, Index d) {
  if (!(mu > 0)) throw ConfigError("strongly convex reduction needs mu > 0");
  if (!(cfg.G > 0)) throw ConfigError("G must be positive");
  ReductionPlan plan;
  plan.sco = sco;
  plan.mu = mu;
  const double nd = static_cast<double>(n);
  const double md = static_cast<double>(m);
  plan.beta = cfg.beta.value_or(1 / (2 * nd * nd * md));
  if (!(plan.beta > 0 && plan.beta < 1))
    throw ArgumentError("beta must lie in (0, 1)");
  const double log_inv_beta = std::log(1 / plan.beta);
  plan.stage1_target =
      10 * cfg.G * std::sqrt(log_inv_beta) / (mu * nd * std::sqrt(md));
  plan.stage1_sigma = output_pert_sigma(
      output_pert_constants(cfg.privacy.eps / 2, cfg.privacy.delta / 2),
      plan.stage1_target);
  plan.radius =
      plan.stage1_sigma * std::sqrt(static_cast<double>(d) * log_inv_beta);
  if (sco) plan.radius += cfg.G * std::sqrt(log_inv_beta) / (mu * std::sqrt(nd * md));
  plan.lambda = default_lambda(cfg.G, plan.radius, d, n, m);
  return plan;
}

PhasedConfig stage2_config(const PhasedConfig& cfg, const ReductionPlan& plan) {
  PhasedConfig out = cfg;
  out.privacy = PrivacyParams(cfg.privacy.eps / 2, cfg.privacy.delta / 2);
  out.lambda = plan.lambda;
  out.beta = plan.beta;
  return out;
}

namespace {

MechanismResult run_reduction(bool sco, const LossPtr& loss,
                              const UserDataset& ds, const FeasibleRegion& K,
                              const PhasedConfig& cfg, RandomSource& rng) {
  const double mu = loss->strong_convexity();
  const ReductionPlan plan = reduction_plan(sco, cfg, mu, ds.num_users(),
                                            ds.items_per_user(), ds.dim());
  MechanismResult first = with_context("stage 1", [&] {
    SCOutputPertConfig sc(
        PrivacyParams(cfg.privacy.eps / 2, cfg.privacy.delta / 2), plan.beta,
        cfg.G, mu);
    sc.mode = cfg.mode;
    sc.enumeration_budget = cfg.enumeration_budget;
    sc.max_iters = cfg.max_iters;
    sc.non_private = cfg.non_private;
    sc.threshold_C = cfg.threshold_C;
    return sc_output_pert(loss, ds, K, sc, rng);
  });
  if (first.is_bottom()) {
    MechanismTrace t = first.trace();
    t.stage = "stage1";
    return MechanismResult::bottom(std::move(t));
  }
  const Vector theta0 = first.theta();
  const PhasedConfig cfg2 = stage2_config(cfg, plan);
  MechanismResult second = with_context("stage 2", [&] {
    const FeasibleRegion K2 = K.intersect(Ball{theta0, plan.radius});
    return sco ? phased_sco(loss, ds, K2, cfg2, rng)
               : phased_erm(loss, ds, K2, cfg2, rng);
  });
  MechanismTrace& t = second.mutable_trace();
  t.stage = "stage2";
  t.stage1_output = theta0;
  for (const auto& w : first.trace().warnings)
    t.warnings.insert(t.warnings.begin(), "stage 1: " + w);
  return second;
}

}  // namespace

MechanismResult strongly_convex_erm(const LossPtr& loss, const UserDataset& ds,
                                    const FeasibleRegion& K,
                                    const PhasedConfig& cfg, RandomSource& rng) {
  return run_reduction(false, loss, ds, K, cfg, rng);
}

MechanismResult strongly_convex_sco(const LossPtr& loss, const UserDataset& ds,
                                    const FeasibleRegion& K,
                                    const PhasedConfig& cfg, RandomSource& rng) {
  return run_reduction(true, loss, ds, K, cfg, rng);
}

}  // namespace userdp
