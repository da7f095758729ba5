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

#include "userdp/sensitivity.h"

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>

#include "userdp/errors.h"

namespace userdp {

namespace {

// Calls fn on every k-subset of pool in lexicographic order until fn
// returns false. Returns false if stopped early.
template <typename Fn>
bool for_each_combination(const std::vector<Index>& pool, int k, Fn&& fn) {
  const int n = static_cast<int>(pool.size());
  if (k > n) return true;
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  std::vector<Index> combo(k);
  for (;;) {
    for (int i = 0; i < k; ++i) combo[i] = pool[idx[i]];
    if (!fn(combo)) return false;
    int i = k - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) return true;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

std::vector<Index> merged(const std::vector<Index>& a,
                          const std::vector<Index>& b) {
  std::vector<Index> out;
  out.reserve(a.size() + b.size());
  std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

std::vector<Index> survivors(Index n, const std::vector<Index>& removed) {
  std::vector<Index> out;
  out.reserve(n - removed.size());
  std::size_t p = 0;
  for (Index i = 0; i < n; ++i) {
    if (p < removed.size() && removed[p] == i) {
      ++p;
      continue;
    }
    out.push_back(i);
  }
  return out;
}

double binomial(Index n, Index k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  double c = 1;
  for (Index i = 1; i <= k; ++i) c = c * static_cast<double>(n - k + i) / i;
  return c;
}

}  // namespace

SubsetMap subset_map(DatasetMap f, const UserDataset& ds) {
  auto data = std::make_shared<const UserDataset>(ds);
  return [f = std::move(f), data](const std::vector<Index>& removed) {
    if (removed.empty()) return f(*data);
    return f(delete_users(*data, removed));
  };
}

SubsetMap mean_subset_map(const UserDataset& ds) {
  Eigen::MatrixXd sums(ds.dim(), ds.num_users());
  for (Index i = 0; i < ds.num_users(); ++i)
    sums.col(i) = ds.user(i).colwise().sum().transpose();
  const Vector total = sums.rowwise().sum();
  const Index n = ds.num_users();
  const Index m = ds.items_per_user();
  return [sums, total, n, m](const std::vector<Index>& removed) {
    Vector s = total;
    for (Index i : removed) s -= sums.col(i);
    return Vector(s / static_cast<double>((n - removed.size()) * m));
  };
}

DatasetMap minimizer_map(RegularizedObjective obj, FeasibleRegion region,
                         SolverConfig cfg) {
  return [obj = std::move(obj), region = std::move(region),
          cfg](const UserDataset& ds) {
    return erm_minimize(obj, ds, region, cfg);
  };
}

double subset_count(Index n, int r) {
  double total = 0;
  for (int s = 0; s <= r && s <= n; ++s) total += binomial(n, s);
  return total;
}

DeletionLattice::DeletionLattice(SubsetMap f, Index n)
    : f_(std::move(f)), n_(n) {
  if (n < 1) throw ArgumentError("lattice needs n >= 1");
}

const Vector& DeletionLattice::value(const std::vector<Index>& removed) {
  std::vector<bool> key(n_, false);
  for (Index i : removed) key[i] = true;
  auto it = cache_.find(key);
  if (it == cache_.end()) it = cache_.emplace(std::move(key), f_(removed)).first;
  return it->second;
}

double DeletionLattice::delsen(const std::vector<Index>& removed) {
  if (static_cast<double>(++subsets_) > limit_) {
    throw CapabilityError("deletion lattice passed its subset limit");
  }
  const std::vector<Index> alive = survivors(n_, removed);
  if (alive.size() < 2) return 0;
  const Vector& base = value(removed);
  double worst = 0;
  for (Index i : alive) {
    const Vector& v = value(merged(removed, {i}));
    worst = std::max(worst, (base - v).norm());
  }
  return worst;
}

double DeletionLattice::delsen_r(const std::vector<Index>& removed, int r,
                                 double stop_above) {
  const std::vector<Index> alive = survivors(n_, removed);
  const int k = static_cast<int>(alive.size());
  if (k < 2) return 0;
  const int rr = std::max(0, std::min(r, k - 2));
  double worst = 0;
  for (int s = 0; s <= rr; ++s) {
    const bool finished =
        for_each_combination(alive, s, [&](const std::vector<Index>& T) {
          worst = std::max(worst, delsen(merged(removed, T)));
          return worst <= stop_above;
        });
    if (!finished) break;
  }
  return worst;
}

double delsen_exact(const DatasetMap& f, const UserDataset& ds) {
  if (ds.num_users() < 2)
    throw ArgumentError("delsen_exact needs at least two users");
  DeletionLattice lattice(subset_map(f, ds), ds.num_users());
  return lattice.delsen({});
}

double delsen_r_exact(const SubsetMap& f, Index n, int r, double budget) {
  if (r < 0) throw ArgumentError("r must be >= 0");
  if (r + 1 >= n) {
    throw ArgumentError("delsen_r_exact needs r + 1 < n (r = " +
                        std::to_string(r) + ", n = " + std::to_string(n) + ")");
  }
  if (subset_count(n, r) > budget) {
    throw CapabilityError("delsen_r_exact: enumeration exceeds budget; use "
                          "the certificate path");
  }
  DeletionLattice lattice(f, n);
  return lattice.delsen_r({}, r);
}

double delsen_r_exact(const DatasetMap& f, const UserDataset& ds, int r,
                      double budget) {
  return delsen_r_exact(subset_map(f, ds), ds.num_users(), r, budget);
}

double certificate_bound(Index n, int r, double mu, double gamma,
                         double residual) {
  if (r < 0 || 2 * (r + 1) > n) {
    throw ArgumentError("certificate needs r + 1 <= n/2 (r = " +
                        std::to_string(r) + ", n = " + std::to_string(n) + ")");
  }
  if (!(mu > 0)) throw ConfigError("certificate needs mu > 0");
  auto D = [&](int s) {
    const double e = s * gamma / static_cast<double>(n - s);
    return (e + std::sqrt(e * e + 2 * mu * residual)) / mu;
  };
  return D(r) + D(r + 1);
}

Certificate delsen_certificate(const RegularizedObjective& obj,
                               const UserDataset& ds,
                               const FeasibleRegion& region, int r,
                               const SolverConfig& cfg,
                               const Vector* minimizer) {
  const double mu = obj.strong_convexity();
  if (!(mu > 0)) throw ConfigError("certificate needs a strongly convex objective");
  const Index n = ds.num_users();
  if (r < 0 || 2 * (r + 1) > n) {
    throw ArgumentError("certificate needs r + 1 <= n/2 (r = " +
                        std::to_string(r) + ", n = " + std::to_string(n) + ")");
  }
  Certificate c;
  c.mu = mu;
  c.minimizer = minimizer ? region.project(*minimizer)
                          : erm_minimize(obj, ds, region, cfg);
  const Eigen::MatrixXd grads = per_user_gradients(obj, ds, c.minimizer);
  const Vector gbar = grads.rowwise().mean();
  c.gamma = (grads.colwise() - gbar).colwise().norm().maxCoeff();
  c.gamma_uncentered = grads.colwise().norm().maxCoeff();
  c.residual = suboptimality_bound(c.minimizer, gbar, mu, region);
  c.bound = certificate_bound(n, r, mu, c.gamma, c.residual);
  return c;
}

ProbeResult stable_set_probe(const SubsetMap& f, Index n, int r1, int kappa,
                             double target, ProbeMode mode,
                             const Certifier& certifier, double budget) {
  if (r1 < 0) throw ArgumentError("r1 must be >= 0");
  if (4 * kappa - r1 < 0) throw ArgumentError("need 4 kappa - r1 >= 0");
  if (n < 1) throw ArgumentError("probe needs n >= 1");
  ProbeResult result;

  if (mode == ProbeMode::kCertificate && certifier) {
    if (n < 2) {
      result.found = true;
      return result;
    }
    const int rr = static_cast<int>(std::min<Index>(4 * kappa, n - 2));
    if (auto b = certifier(rr); b && *b <= target) {
      result.found = true;
      result.certified = true;
      return result;
    }
  }

  const int smax = static_cast<int>(std::min<Index>(r1, n - 1));
  double cost = 0;
  for (int s = 0; s <= smax; ++s) {
    const Index alive = n - s;
    const int rr = static_cast<int>(
        std::max<Index>(0, std::min<Index>(4 * kappa - s, alive - 2)));
    cost += binomial(n, s) * subset_count(alive, rr);
  }
  if (cost > budget) {
    if (mode == ProbeMode::kExhaustive) {
      throw CapabilityError("stable_set_probe: exhaustive search needs ~" +
                            std::to_string(cost) +
                            " subsets, over budget; use certificate mode");
    }
    result.budget_exhausted = true;
    return result;
  }

  DeletionLattice lattice(f, n);
  std::vector<Index> all(n);
  for (Index i = 0; i < n; ++i) all[i] = i;
  for (int s = 0; s <= smax && !result.found; ++s) {
    for_each_combination(all, s, [&](const std::vector<Index>& S) {
      if (lattice.delsen_r(S, 4 * kappa - s, target) <= target) {
        result.found = true;
        result.removed = S;
        return false;
      }
      return true;
    });
  }
  return result;
}

SensitivityReport sensitivity_report(const RegularizedObjective& obj,
                                     const UserDataset& ds,
                                     const FeasibleRegion& region, int max_r,
                                     ProbeMode mode, const SolverConfig& cfg,
                                     double budget) {
  if (max_r < 0) throw ArgumentError("max_r must be >= 0");
  SensitivityReport report;
  report.method = mode;
  if (mode == ProbeMode::kExhaustive) {
    const SubsetMap f = subset_map(minimizer_map(obj, region, cfg), ds);
    if (ds.num_users() < 2) throw ArgumentError("report needs n >= 2");
    if (subset_count(ds.num_users(), max_r) > budget)
      throw CapabilityError("sensitivity report exceeds enumeration budget");
    if (max_r + 1 >= ds.num_users())
      throw ArgumentError("report needs max_r + 1 < n");
    DeletionLattice lattice(f, ds.num_users());
    for (int r = 0; r <= max_r; ++r) report.delsen_r[r] = lattice.delsen_r({}, r);
    report.delsen = report.delsen_r[0];
    return report;
  }
  const Vector theta = erm_minimize(obj, ds, region, cfg);
  for (int r = 0; r <= max_r; ++r) {
    const Certificate c = delsen_certificate(obj, ds, region, r, cfg, &theta);
    report.delsen_r[r] = c.bound;
    report.gamma = c.gamma_uncentered;
  }
  report.delsen = report.delsen_r[0];
  return report;
}

}  // namespace userdp
