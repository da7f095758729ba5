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

#include "userdp/verify.h"

#include <cmath>
#include <cstdio>

#include "userdp/errors.h"
#include "userdp/generators.h"
#include "userdp/solvers.h"

namespace userdp {

namespace {

TrialReport finish(long exceed, long trials, double max_ratio) {
  TrialReport r;
  r.exceed = wilson_interval(exceed, trials);
  r.max_ratio = max_ratio;
  return r;
}

}  // namespace

double permutation_sum_threshold(double G, Index m, double beta) {
  return 5 * G * std::sqrt(static_cast<double>(m) * std::log(1 / beta));
}

TrialReport permutation_concentration_trial(const Eigen::MatrixXd& vectors,
                                            Index m, double G, long trials,
                                            double beta, RandomSource& rng) {
  const Index N = vectors.rows();
  if (m < 1 || m >= N) throw ArgumentError("need 1 <= m < N");
  if (trials < 1) throw ArgumentError("need trials >= 1");
  if (vectors.colwise().sum().norm() > 1e-9 * G * static_cast<double>(N))
    throw ArgumentError("vectors must sum to zero");
  if (vectors.rowwise().norm().maxCoeff() > G * (1 + 1e-9))
    throw ArgumentError("vector norm exceeds G");
  const double threshold = permutation_sum_threshold(G, m, beta);
  std::vector<Index> p(N);
  for (Index k = 0; k < N; ++k) p[k] = k;
  long exceed = 0;
  double max_ratio = 0;
  Eigen::RowVectorXd sum(vectors.cols());
  for (long t = 0; t < trials; ++t) {
    sum.setZero();
    for (Index k = 0; k < m; ++k) {
      const Index j =
          k + static_cast<Index>(rng.uniform_index(static_cast<std::uint64_t>(N - k)));
      std::swap(p[k], p[j]);
      sum += vectors.row(p[k]);
    }
    const double norm = sum.norm();
    if (norm > threshold) ++exceed;
    max_ratio = std::max(max_ratio, norm / threshold);
  }
  return finish(exceed, trials, max_ratio);
}

double deletion_stability_bound(double G, double mu, Index n, Index m,
                                double beta) {
  return 5 * G * std::sqrt(std::log(1 / beta)) /
         (mu * static_cast<double>(n - 1) * std::sqrt(static_cast<double>(m)));
}

TrialReport deletion_stability_trial(const LossPtr& loss, const UserDataset& ds,
                                     long trials, double beta,
                                     RandomSource& rng) {
  const double mu = loss->strong_convexity();
  if (!(mu > 0)) throw ConfigError("deletion stability needs mu > 0");
  const Index n = ds.num_users();
  if (n < 2) throw ArgumentError("deletion stability needs n >= 2");
  if (trials < 1) throw ArgumentError("need trials >= 1");
  const double bound =
      deletion_stability_bound(loss->lipschitz(), mu, n, ds.items_per_user(),
                               beta);
  const RegularizedObjective obj(loss);
  const FeasibleRegion all = FeasibleRegion::unbounded(ds.dim());
  SolverConfig cfg;
  cfg.tol_param = bound * 1e-6;
  long exceed = 0;
  double max_ratio = 0;
  for (long t = 0; t < trials; ++t) {
    const UserDataset x = permute(ds, rng).data;
    const Vector a = erm_minimize(obj, x, all, cfg);
    const Vector b = erm_minimize(obj, delete_users(x, {n - 1}), all, cfg);
    const double dist = (a - b).norm();
    if (dist > bound) ++exceed;
    max_ratio = std::max(max_ratio, dist / bound);
  }
  return finish(exceed, trials, max_ratio);
}

double erm_closeness_bound(double G, double mu, Index n, Index m, double beta) {
  return 30 * G * std::sqrt(std::log(2 / beta)) /
         (mu * std::sqrt(static_cast<double>(n * m)));
}

TrialReport erm_closeness_trial(const TruncatedGaussianSpec& spec, double zeta,
                                double G, Index n, Index m, long draws,
                                double beta, RandomSource& rng) {
  if (draws < 1) throw ArgumentError("need draws >= 1");
  const Vector population = truncated_gaussian_mean(spec);
  const double bound = erm_closeness_bound(G, 2 * zeta, n, m, beta);
  long exceed = 0;
  double max_ratio = 0;
  for (long t = 0; t < draws; ++t) {
    const UserDataset x = trunc_gauss_dataset(spec, n, m, rng);
    const double dist = (x.mean() - population).norm();
    if (dist > bound) ++exceed;
    max_ratio = std::max(max_ratio, dist / bound);
  }
  return finish(exceed, draws, max_ratio);
}

double union_stability_scale(double G, double mu, Index n, Index m, int r,
                        double beta) {
  const double nd = static_cast<double>(n);
  return G * std::sqrt(r * std::log(nd) + std::log(1 / beta)) /
         (mu * nd * std::sqrt(static_cast<double>(m)));
}

std::vector<double> union_stability_ratios(const UserDataset& ds, double zeta,
                                      double G, int r, long trials,
                                      double beta, RandomSource& rng) {
  const Index n = ds.num_users();
  if (r < 0 || r + 1 >= n) throw ArgumentError("need 0 <= r < n - 1");
  const double scale =
      union_stability_scale(G, 2 * zeta, n, ds.items_per_user(), r, beta);
  std::vector<double> out;
  out.reserve(trials);
  for (long t = 0; t < trials; ++t) {
    const UserDataset x = permute(ds, rng).data;
    DeletionLattice lattice(mean_subset_map(x), n);
    out.push_back(lattice.delsen_r({}, r) / scale);
  }
  return out;
}

TrialReport union_stability_trial(const UserDataset& ds, double zeta, double G,
                             int r, long trials, double beta, double constant,
                             RandomSource& rng) {
  const std::vector<double> ratios =
      union_stability_ratios(ds, zeta, G, r, trials, beta, rng);
  long exceed = 0;
  double max_ratio = 0;
  for (double q : ratios) {
    if (q > constant) ++exceed;
    max_ratio = std::max(max_ratio, q / constant);
  }
  return finish(exceed, trials, max_ratio);
}

SoundnessReport certificate_soundness_check(long instances,
                                            RandomSource& rng) {
  SoundnessReport report;
  SolverConfig cfg;
  cfg.tol_param = 1e-12;
  for (long t = 0; t < instances; ++t) {
    const int r = static_cast<int>(rng.uniform_index(3));
    const Index n_min = 2 * r + 2;
    const Index n = n_min + static_cast<Index>(rng.uniform_index(9 - n_min));
    const Index m = 1 + static_cast<Index>(rng.uniform_index(3));
    const Index d = 1 + static_cast<Index>(rng.uniform_index(3));
    ItemMatrix items(n * m, d);
    for (Index k = 0; k < items.size(); ++k)
      items.data()[k] = 2 * rng.uniform01() - 1;
    const UserDataset ds(std::move(items), n, m);
    const double zeta = 0.25 + 1.75 * rng.uniform01();
    const LossPtr loss = make_squared_loss(zeta, 1);
    Vector center = Vector::Zero(d);
    double weight = 0;
    FeasibleRegion region = FeasibleRegion::unbounded(d);
    switch (t % 3) {
      case 1:
        for (Index k = 0; k < d; ++k) center(k) = 2 * rng.uniform01() - 1;
        weight = 2 * rng.uniform01();
        break;
      case 2: {
        Vector c(d);
        for (Index k = 0; k < d; ++k) c(k) = 2 * rng.uniform01() - 1;
        region = FeasibleRegion::ball(c, 0.05 + 0.5 * rng.uniform01());
        break;
      }
      default:
        break;
    }
    const RegularizedObjective obj(loss, center, weight);
    const double exact =
        delsen_r_exact(minimizer_map(obj, region, cfg), ds, r);
    const Certificate c = delsen_certificate(obj, ds, region, r, cfg);
    ++report.instances;
    if (exact > c.bound * (1 + 1e-9) + 1e-12) ++report.violations;
    if (c.bound > 0) report.max_ratio = std::max(report.max_ratio, exact / c.bound);
  }
  return report;
}

ScanResult neighbor_stability_scan(
    const std::function<SubsetMap(const UserDataset&)>& make_map,
    const std::vector<double>& grid, Index n_max, Index m_max,
    const std::vector<double>& deltas, int kappa, double budget) {
  if (grid.empty() || deltas.empty() || n_max < 1 || m_max < 1 || kappa < 1)
    throw ArgumentError("neighbor_stability_scan: empty domain");
  const int rmax = 4 * kappa;
  ScanResult result;
  for (Index m = 1; m <= m_max; ++m) {
    // User types: sorted m-tuples over the grid.
    std::vector<std::vector<double>> types;
    std::vector<int> idx(m, 0);
    for (;;) {
      std::vector<double> t(m);
      for (Index j = 0; j < m; ++j) t[j] = grid[idx[j]];
      types.push_back(std::move(t));
      Index j = m - 1;
      while (j >= 0 && idx[j] == static_cast<int>(grid.size()) - 1) --j;
      if (j < 0) break;
      ++idx[j];
      for (Index k = j + 1; k < m; ++k) idx[k] = idx[j];
    }
    const Index K = static_cast<Index>(types.size());
    for (Index n = 1; n <= n_max; ++n) {
      double count = 1;
      for (Index i = 0; i < n; ++i) count *= static_cast<double>(K);
      if (count * deltas.size() * (rmax + 1) > budget)
        throw CapabilityError("neighbor_stability_scan over budget");
      const long total = static_cast<long>(count);
      // stable[(ds * |deltas| + di) * (rmax + 1) + r]
      std::vector<char> stable(total * deltas.size() * (rmax + 1));
      auto decode = [&](long code) {
        std::vector<Index> who(n);
        for (Index i = n - 1; i >= 0; --i) {
          who[i] = code % K;
          code /= K;
        }
        return who;
      };
      for (long code = 0; code < total; ++code) {
        const std::vector<Index> who = decode(code);
        ItemMatrix items(n * m, 1);
        for (Index i = 0; i < n; ++i)
          for (Index j = 0; j < m; ++j) items(i * m + j, 0) = types[who[i]][j];
        const UserDataset ds(std::move(items), n, m);
        const SubsetMap f = make_map(ds);
        for (std::size_t di = 0; di < deltas.size(); ++di) {
          for (int r = 0; r <= rmax; ++r) {
            const ProbeResult p = stable_set_probe(
                f, n, r, kappa, deltas[di], ProbeMode::kExhaustive, {}, budget);
            stable[(code * deltas.size() + di) * (rmax + 1) + r] = p.found;
          }
        }
        ++result.datasets;
      }
      long stride = 1;
      std::vector<long> strides(n);
      for (Index i = n - 1; i >= 0; --i) {
        strides[i] = stride;
        stride *= K;
      }
      for (long xp = 0; xp < total; ++xp) {
        const std::vector<Index> who = decode(xp);
        for (Index i = 0; i < n; ++i) {
          for (Index t = 0; t < K; ++t) {
            if (t == who[i]) continue;
            const long x = xp + (t - who[i]) * strides[i];
            ++result.pairs;
            for (std::size_t di = 0; di < deltas.size(); ++di) {
              for (int r1 = 0; r1 < rmax; ++r1) {
                ++result.checks;
                const bool lhs =
                    stable[(xp * deltas.size() + di) * (rmax + 1) + r1];
                const bool rhs =
                    stable[(x * deltas.size() + di) * (rmax + 1) + r1 + 1];
                if (lhs && !rhs) ++result.violations;
              }
            }
          }
        }
      }
    }
  }
  return result;
}

namespace {

class Auditor {
 public:
  explicit Auditor(AuditReport& report) : report_(report) {}

  void real(const std::string& what, double live, double expected) {
    ++report_.checked;
    const double scale = std::max(std::abs(live), std::abs(expected));
    if (!(std::abs(live - expected) <= 1e-12 * scale) &&
        !(live == expected)) {
      char buf[160];
      std::snprintf(buf, sizeof(buf), "%s: live %.17g, expected %.17g",
                    what.c_str(), live, expected);
      report_.mismatches.push_back(buf);
    }
  }
  void integer(const std::string& what, long live, long expected) {
    ++report_.checked;
    if (live != expected) {
      report_.mismatches.push_back(what + ": live " + std::to_string(live) +
                                   ", expected " + std::to_string(expected));
    }
  }
  void truth(const std::string& what, bool ok) {
    ++report_.checked;
    if (!ok) report_.mismatches.push_back(what);
  }

 private:
  AuditReport& report_;
};

int reference_kappa(long double eps, long double delta) {
  return 1 + static_cast<int>(std::ceil(std::log(1 / delta) / eps));
}

void audit_phases(Auditor& a, const PhasedSchedule& live, double G,
                  double lambda, long double eps, long double delta,
                  double beta, int T) {
  a.integer("phase count", static_cast<long>(live.phases.size()), T);
  const std::size_t shown = std::min<std::size_t>(live.phases.size(), T);
  double lam = lambda;
  for (std::size_t k = 0; k < shown; ++k) {
    const PhaseSpec& p = live.phases[k];
    const std::string tag = "phase " + std::to_string(k + 1) + " ";
    lam *= 4;
    a.integer(tag + "index", p.index, static_cast<long>(k + 1));
    a.real(tag + "eps", p.eps, static_cast<double>(eps));
    a.real(tag + "delta", p.delta, static_cast<double>(delta));
    a.real(tag + "beta", p.beta, beta / T);
    a.real(tag + "lambda", p.lambda, lam);
    a.real(tag + "radius", p.radius, G / lam);
    const long double eps_bar = eps / 2;
    const long double delta_bar = delta / (std::exp(eps_bar) + 2);
    const int kappa = reference_kappa(eps_bar, delta_bar);
    a.integer(tag + "kappa", p.kappa, kappa);
    const double users = static_cast<double>(p.end_user - p.first_user);
    const double target = 20 * G * std::sqrt(std::log(T / beta)) /
                          (lam * users * std::sqrt(double(live.m)));
    a.real(tag + "target sensitivity", p.target_sensitivity, target);
    const double sigma = static_cast<double>(
        16 * kappa * target * std::sqrt(std::log(2 / delta_bar)) / eps_bar);
    a.real(tag + "sigma", p.sigma, sigma);
    if (k > 0) {
      a.real(tag + "radius shrink", p.radius, live.phases[k - 1].radius / 4);
    }
  }
}

}  // namespace

AuditReport budget_audit(const PhasedSchedule& live, const PhasedConfig& cfg,
                         double diameter) {
  AuditReport report;
  Auditor a(report);
  const double n = static_cast<double>(live.n);
  const double m = static_cast<double>(live.m);
  const double d = static_cast<double>(live.d);
  const double beta = cfg.beta ? *cfg.beta : 1 / (n * m);
  const double lambda =
      cfg.lambda ? *cfg.lambda : cfg.G * std::sqrt(d) / (diameter * n * std::sqrt(m));
  a.real("beta", live.beta, beta);
  a.real("lambda", live.lambda, lambda);
  a.real("G", live.G, cfg.G);

  if (live.algorithm == Algorithm::kPhasedErm) {
    const int T = static_cast<int>(std::ceil(std::log2(n * m)));
    a.integer("T", live.T, T);
    const long double eps = static_cast<long double>(cfg.privacy.eps) / T;
    const long double delta = static_cast<long double>(cfg.privacy.delta) / T;
    a.real("eps'", live.eps_phase, static_cast<double>(eps));
    a.real("delta'", live.delta_phase, static_cast<double>(delta));
    a.real("beta'", live.beta_phase, beta / T);
    audit_phases(a, live, cfg.G, lambda, eps, delta, beta, T);
    long double eps_sum = 0, delta_sum = 0;
    for (const PhaseSpec& p : live.phases) {
      eps_sum += p.eps;
      delta_sum += p.delta;
      a.truth("phase " + std::to_string(p.index) + " uses every user",
              p.first_user == 0 && p.end_user == live.n);
    }
    a.real("composed eps", static_cast<double>(eps_sum), cfg.privacy.eps);
    a.real("composed delta", static_cast<double>(delta_sum), cfg.privacy.delta);
    return report;
  }

  if (live.algorithm != Algorithm::kPhasedSco) {
    report.mismatches.push_back("schedule has an unexpected algorithm tag");
    return report;
  }
  const double N0 = cfg.threshold_C * std::log(1 / cfg.privacy.delta) /
                    cfg.privacy.eps;
  a.real("N0", live.N0, N0);
  const int T0 = static_cast<int>(std::ceil(std::log2(n / N0)));
  a.truth("T <= ceil(log2(n/N0))", live.T >= 1 && live.T <= T0);
  auto slice = [&](int i) {
    // 1-based [ceil(n 2^-i), ceil(n 2^-(i-1))) in 0-based form.
    const long lo = static_cast<long>(std::ceil(n / std::pow(2.0, i))) - 1;
    const long hi = static_cast<long>(std::ceil(n / std::pow(2.0, i - 1))) - 1;
    return std::pair<long, long>(lo, hi);
  };
  if (live.T < T0) {
    const auto [lo, hi] = slice(live.T + 1);
    a.truth("T is the largest count whose slices hold N0 users",
            static_cast<double>(hi - lo) < N0);
  }
  a.real("eps per phase", live.eps_phase, cfg.privacy.eps);
  a.real("delta per phase", live.delta_phase, cfg.privacy.delta);
  a.real("beta'", live.beta_phase, beta / live.T);
  audit_phases(a, live, cfg.G, lambda, cfg.privacy.eps, cfg.privacy.delta,
               beta, live.T);
  for (std::size_t k = 0; k < live.phases.size(); ++k) {
    const PhaseSpec& p = live.phases[k];
    const auto [lo, hi] = slice(static_cast<int>(k + 1));
    const std::string tag = "phase " + std::to_string(k + 1) + " ";
    a.integer(tag + "first user", p.first_user, lo);
    a.integer(tag + "end user", p.end_user, hi);
    a.truth(tag + "slice holds N0 users",
            static_cast<double>(p.end_user - p.first_user) >= N0);
    for (std::size_t j = 0; j < k; ++j) {
      const PhaseSpec& q = live.phases[j];
      a.truth(tag + "disjoint from phase " + std::to_string(j + 1),
              p.end_user <= q.first_user || q.end_user <= p.first_user);
    }
  }
  return report;
}

AuditReport budget_audit(const ReductionPlan& live,
                         const PhasedSchedule& stage2, const PhasedConfig& cfg,
                         Index n_in, Index m_in, Index d_in) {
  AuditReport report;
  Auditor a(report);
  const double n = static_cast<double>(n_in);
  const double m = static_cast<double>(m_in);
  const double d = static_cast<double>(d_in);
  const double beta = cfg.beta ? *cfg.beta : 1 / (2 * n * n * m);
  a.real("beta", live.beta, beta);
  const double target =
      10 * cfg.G * std::sqrt(std::log(1 / beta)) / (live.mu * n * std::sqrt(m));
  a.real("stage 1 target sensitivity", live.stage1_target, target);
  const long double eps_bar = cfg.privacy.eps / 4.0L;
  const long double delta_bar = (cfg.privacy.delta / 2.0L) / (std::exp(eps_bar) + 2);
  const int kappa = reference_kappa(eps_bar, delta_bar);
  const double sigma = static_cast<double>(
      16 * kappa * target * std::sqrt(std::log(2 / delta_bar)) / eps_bar);
  a.real("stage 1 sigma", live.stage1_sigma, sigma);
  double radius = sigma * std::sqrt(d * std::log(1 / beta));
  if (live.sco)
    radius += cfg.G * std::sqrt(std::log(1 / beta)) / (live.mu * std::sqrt(n * m));
  a.real("R'", live.radius, radius);
  const double lambda = cfg.G * std::sqrt(d) / (radius * n * std::sqrt(m));
  a.real("stage 2 lambda", live.lambda, lambda);

  PhasedConfig c2(PrivacyParams(cfg.privacy.eps / 2, cfg.privacy.delta / 2),
                  cfg.G);
  c2.lambda = lambda;
  c2.beta = beta;
  c2.threshold_C = cfg.threshold_C;
  a.truth("stage 2 algorithm",
          stage2.algorithm ==
              (live.sco ? Algorithm::kPhasedSco : Algorithm::kPhasedErm));
  const AuditReport inner = budget_audit(stage2, c2, 2 * radius);
  report.checked += inner.checked;
  for (const auto& s : inner.mismatches)
    report.mismatches.push_back("stage 2 " + s);
  return report;
}

}  // namespace userdp
