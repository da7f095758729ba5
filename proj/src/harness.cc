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

#include "userdp/harness.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include "userdp/errors.h"
#include "userdp/generators.h"
#include "userdp/mechanisms.h"
#include "userdp/noise.h"
#include "userdp/phased.h"
#include "userdp/privacy.h"
#include "userdp/solvers.h"
#include "userdp/stats.h"
#include "userdp/verify.h"

namespace userdp {

namespace {

double number(const Json& j, const char* key, double fallback) {
  if (!j.contains(key) || j[key].is_null()) return fallback;
  if (!j[key].is_number()) throw ArgumentError(std::string(key) + " must be a number");
  return j[key].get<double>();
}

std::optional<double> optional_number(const Json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  if (!j[key].is_number()) throw ArgumentError(std::string(key) + " must be a number");
  return j[key].get<double>();
}

// A radius: positive number, or null / "inf" for unbounded.
double radius(const Json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::numeric_limits<double>::infinity();
  if (j[key].is_string() && j[key].get<std::string>() == "inf")
    return std::numeric_limits<double>::infinity();
  if (!j[key].is_number()) throw ArgumentError(std::string(key) + " must be a number or \"inf\"");
  const double r = j[key].get<double>();
  if (!(r > 0)) throw ArgumentError(std::string(key) + " must be positive");
  return r;
}

Index count(const Json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return 0;
  if (!j[key].is_number_integer() || j[key].get<long>() < 1)
    throw ArgumentError(std::string(key) + " must be a positive integer");
  return j[key].get<Index>();
}

// A vector parameter: a number v means v * e_1 (or v in every coordinate
// when fill is set), an array is taken as is.
Vector vector_param(const Json& j, const char* key, Index d, double fallback,
                    bool fill) {
  Vector v = Vector::Zero(d);
  if (!j.contains(key) || j[key].is_null()) {
    if (fill) v.setConstant(fallback); else v(0) = fallback;
    return v;
  }
  if (j[key].is_number()) {
    if (fill) v.setConstant(j[key].get<double>()); else v(0) = j[key].get<double>();
    return v;
  }
  if (!j[key].is_array() || static_cast<Index>(j[key].size()) != d)
    throw ArgumentError(std::string(key) + " must be a number or a length-d array");
  for (Index k = 0; k < d; ++k) v(k) = j[key][k].get<double>();
  return v;
}

const std::set<std::string> kConfigKeys = {
    "algorithm", "loss", "n", "m", "d", "eps", "delta", "beta", "R", "data",
    "seeds", "mode", "output", "lambda", "target_sensitivity", "C",
    "enumeration_budget", "max_iters", "non_private", "timing", "labels"};

std::string generator_of(const Json& data) {
  if (!data.is_object() || !data.contains("generator") ||
      !data["generator"].is_string())
    throw ArgumentError("data.generator is required");
  return data["generator"].get<std::string>();
}

// Norm bound of the generated items, if the generator has one.
std::optional<double> data_bound(const Json& data, Index d) {
  const std::string gen = generator_of(data);
  if (gen == "trunc-gauss") {
    const double B = radius(data, "B");
    if (std::isfinite(B)) return B;
  } else if (gen == "two-cluster" && data.contains("a")) {
    return std::abs(number(data, "a", 1));
  } else if (gen == "identical" && d > 0) {
    return vector_param(data, "value", d, 0, true).norm();
  }
  return std::nullopt;
}

}  // namespace

ExperimentConfig parse_config(const Json& j) {
  if (!j.is_object()) throw ArgumentError("config must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (!kConfigKeys.count(key)) throw ArgumentError("unknown config field '" + key + "'");
  }
  ExperimentConfig c;
  if (!j.contains("algorithm") || !j["algorithm"].is_string())
    throw ArgumentError("algorithm is required");
  c.algorithm = j["algorithm"].get<std::string>();
  if (std::find(std::begin(kAlgorithms), std::end(kAlgorithms), c.algorithm) ==
      std::end(kAlgorithms))
    throw ArgumentError("unknown algorithm '" + c.algorithm + "'");

  if (!j.contains("loss") || !j["loss"].is_object() || !j["loss"].contains("name"))
    throw ArgumentError("loss.name is required");
  c.loss = j["loss"];
  c.n = count(j, "n");
  c.m = count(j, "m");
  c.d = count(j, "d");
  c.eps = number(j, "eps", c.eps);
  c.delta = number(j, "delta", c.delta);
  PrivacyParams(c.eps, c.delta);
  c.beta = optional_number(j, "beta");
  if (c.beta && !(*c.beta > 0 && *c.beta < 1)) throw ArgumentError("beta must lie in (0, 1)");
  c.R = radius(j, "R");
  if (!j.contains("data")) throw ArgumentError("data is required");
  c.data = j["data"];
  const std::string gen = generator_of(c.data);
  if (gen != "csv" && (c.n == 0 || c.m == 0 || c.d == 0))
    throw ArgumentError("n, m and d are required for generated data");
  if (gen != "csv" && gen != "trunc-gauss" && gen != "two-cluster" &&
      gen != "identical")
    throw ArgumentError("unknown generator '" + gen + "'");
  if (gen == "csv" && (!c.data.contains("path") || !c.data["path"].is_string()))
    throw ArgumentError("csv data needs a path");
  if (gen == "trunc-gauss" && !(number(c.data, "sigma", 1) >= 0))
    throw ArgumentError("trunc-gauss sigma must be >= 0");

  if (!j.contains("seeds")) throw ArgumentError("seeds are required");
  const Json& s = j["seeds"];
  if (s.is_array()) {
    for (const auto& v : s) {
      if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long>() >= 0))
        throw ArgumentError("seeds must be non-negative integers");
      c.seeds.push_back(v.get<std::uint64_t>());
    }
  } else if (s.is_object() && s.contains("count")) {
    const auto start = s.value("start", std::uint64_t{0});
    const auto n = s["count"].get<long>();
    if (n < 1) throw ArgumentError("seeds.count must be positive");
    for (long i = 0; i < n; ++i) c.seeds.push_back(start + i);
  } else {
    throw ArgumentError("seeds must be an array or {\"start\", \"count\"}");
  }
  if (c.seeds.empty()) throw ArgumentError("seeds must not be empty");

  const std::string mode = j.value("mode", std::string("certificate"));
  if (mode == "certificate") c.mode = ProbeMode::kCertificate;
  else if (mode == "exhaustive") c.mode = ProbeMode::kExhaustive;
  else throw ArgumentError("mode must be certificate or exhaustive");
  c.output = j.value("output", std::string());
  c.lambda = optional_number(j, "lambda");
  if (c.lambda && !(*c.lambda > 0)) throw ArgumentError("lambda must be positive");
  c.target_sensitivity = optional_number(j, "target_sensitivity");
  c.C = number(j, "C", c.C);
  if (!(c.C > 0)) throw ArgumentError("C must be positive");
  c.enumeration_budget = number(j, "enumeration_budget", c.enumeration_budget);
  c.max_iters = static_cast<long>(number(j, "max_iters", static_cast<double>(c.max_iters)));
  if (c.max_iters < 1) throw ArgumentError("max_iters must be positive");
  c.non_private = j.value("non_private", false);
  c.timing = j.value("timing", true);
  if (j.contains("labels")) {
    if (!j["labels"].is_object()) throw ArgumentError("labels must be an object");
    c.labels = j["labels"];
  }

  // Operation-level checks that need no data.
  const LossPtr loss = make_loss(c.loss, c.R, c.data, c.d);
  const bool strongly = loss->strong_convexity() > 0;
  if ((c.algorithm == "sc-erm" || c.algorithm == "sc-sco" ||
       c.algorithm == "sc-output-pert") && !strongly)
    throw ConfigError(c.algorithm + " needs a strongly convex loss");
  if ((c.algorithm == "phased-erm" || c.algorithm == "phased-sco" ||
       c.algorithm == "sc-erm" || c.algorithm == "sc-sco") &&
      !std::isfinite(c.R) && !c.lambda)
    throw ConfigError(c.algorithm + " needs a finite R or an explicit lambda");
  if (c.algorithm == "del-output-pert" && !c.target_sensitivity)
    throw ConfigError("del-output-pert needs target_sensitivity");
  return c;
}

std::vector<ExperimentConfig> parse_config_document(const Json& j) {
  std::vector<ExperimentConfig> out;
  if (j.is_array()) {
    for (const auto& e : j) out.push_back(parse_config(e));
    if (out.empty()) throw ArgumentError("empty config list");
  } else {
    out.push_back(parse_config(j));
  }
  return out;
}

Json canonical_json(const ExperimentConfig& c) {
  Json j;
  j["algorithm"] = c.algorithm;
  j["loss"] = c.loss;
  j["n"] = c.n;
  j["m"] = c.m;
  j["d"] = c.d;
  j["eps"] = c.eps;
  j["delta"] = c.delta;
  j["beta"] = c.beta ? Json(*c.beta) : Json(nullptr);
  j["R"] = std::isfinite(c.R) ? Json(c.R) : Json("inf");
  j["data"] = c.data;
  j["mode"] = c.mode == ProbeMode::kCertificate ? "certificate" : "exhaustive";
  j["lambda"] = c.lambda ? Json(*c.lambda) : Json(nullptr);
  j["target_sensitivity"] =
      c.target_sensitivity ? Json(*c.target_sensitivity) : Json(nullptr);
  j["C"] = c.C;
  j["enumeration_budget"] = c.enumeration_budget;
  j["max_iters"] = c.max_iters;
  j["non_private"] = c.non_private;
  j["labels"] = c.labels;
  return j;
}

std::uint64_t config_hash(const ExperimentConfig& cfg) {
  return fnv1a64(canonical_json(cfg).dump());
}

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

LossPtr make_loss(const Json& loss, double R, const Json& data, Index d) {
  const std::string name = loss.value("name", std::string());
  if (name == "squared") {
    const double zeta = number(loss, "zeta", 0.5);
    if (!(zeta > 0)) throw ArgumentError("loss.zeta must be positive");
    std::optional<double> G = optional_number(loss, "G");
    if (!G) {
      const auto bound = data_bound(data, d);
      if (!std::isfinite(R) || !bound)
        throw ConfigError("squared loss needs loss.G unless R and the data "
                          "bound are both finite");
      G = 2 * zeta * (R + *bound);
    }
    return make_squared_loss(zeta, *G);
  }
  if (name == "logistic" || name == "hinge") {
    const double rho = number(loss, "rho", 0.1);
    if (!(rho >= 0)) throw ArgumentError("loss.rho must be >= 0");
    const auto G = optional_number(loss, "G");
    if (!G) throw ConfigError(name + " loss needs loss.G");
    return name == "logistic" ? make_logistic_loss(rho, *G)
                              : make_hinge_loss(rho, *G);
  }
  if (name == "distance") return make_distance_loss();
  throw ArgumentError("unknown loss '" + name + "'");
}

UserDataset generate_dataset(const Json& data, Index n, Index m, Index d,
                             RandomSource& rng) {
  const std::string gen = generator_of(data);
  if (gen == "csv") {
    UserDataset ds = read_dataset_csv_file(data["path"].get<std::string>(), m);
    if (n > 0 && ds.num_users() != n)
      throw DataError("csv has " + std::to_string(ds.num_users()) + " users, config says " + std::to_string(n));
    if (d > 0 && ds.dim() != d)
      throw DataError("csv has d = " + std::to_string(ds.dim()) + ", config says " + std::to_string(d));
    return ds;
  }
  if (gen == "trunc-gauss") {
    TruncatedGaussianSpec spec;
    spec.chi = vector_param(data, "chi", d, 0, false);
    spec.sigma = number(data, "sigma", 1);
    spec.B = radius(data, "B");
    return trunc_gauss_dataset(spec, n, m, rng);
  }
  if (gen == "two-cluster") return two_cluster_dataset(n, m, d, number(data, "a", 1));
  if (gen == "identical") return identical_dataset(n, m, vector_param(data, "value", d, 0, true));
  throw ArgumentError("unknown generator '" + gen + "'");
}

UserDataset generate_dataset(const ExperimentConfig& cfg) {
  const auto seed = cfg.data.value("seed", std::uint64_t{0});
  RandomSource rng = RandomSource(seed).child("data");
  return generate_dataset(cfg.data, cfg.n, cfg.m, cfg.d, rng);
}

int worker_threads() {
  if (const char* env = std::getenv("USERDP_THREADS")) {
    const int t = std::atoi(env);
    if (t > 0) return t;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

PhasedConfig phased_config(const ExperimentConfig& c, const LossModel& loss) {
  PhasedConfig p(PrivacyParams(c.eps, c.delta), loss.lipschitz());
  p.lambda = c.lambda;
  p.beta = c.beta;
  p.threshold_C = c.C;
  p.mode = c.mode;
  p.enumeration_budget = c.enumeration_budget;
  p.max_iters = c.max_iters;
  p.non_private = c.non_private;
  return p;
}

SCOutputPertConfig sc_config(const ExperimentConfig& c, const LossModel& loss,
                             Index n, Index m) {
  SCOutputPertConfig s(PrivacyParams(c.eps, c.delta),
                       c.beta.value_or(1 / static_cast<double>(n * m)),
                       loss.lipschitz(), loss.strong_convexity());
  s.mode = c.mode;
  s.enumeration_budget = c.enumeration_budget;
  s.max_iters = c.max_iters;
  s.non_private = c.non_private;
  s.threshold_C = c.C;
  return s;
}

void require_users(const std::string& where, Index users, double eps,
                   double delta) {
  const int kappa = output_pert_constants(eps, delta).kappa;
  if (users <= 4 * static_cast<Index>(kappa) + 2) {
    throw ConfigError(where + ": output perturbation needs more than 4 kappa + 2 = " +
                      std::to_string(4 * kappa + 2) + " users, has " +
                      std::to_string(users));
  }
}

void require_schedule(const std::string& where, const PhasedSchedule& s) {
  for (const PhaseSpec& p : s.phases)
    require_users(where + " phase " + std::to_string(p.index),
                  p.end_user - p.first_user, p.eps, p.delta);
}

// Rejects configurations whose mechanisms would refuse to run.
void validate_preconditions(const ExperimentConfig& c, const LossModel& loss,
                            Index n, Index m, Index d, double diameter) {
  if (c.non_private) return;
  const std::string& a = c.algorithm;
  if (a == "sc-output-pert" || a == "del-output-pert") {
    require_users(a, n, c.eps, c.delta);
  } else if (a == "phased-erm") {
    require_schedule(a, erm_schedule(phased_config(c, loss), n, m, d, diameter));
  } else if (a == "phased-sco") {
    require_schedule(a, sco_schedule(phased_config(c, loss), n, m, d, diameter));
  } else {
    const PhasedConfig pc = phased_config(c, loss);
    const bool sco = a == "sc-sco";
    require_users(a + " stage 1", n, c.eps / 2, c.delta / 2);
    const ReductionPlan plan =
        reduction_plan(sco, pc, loss.strong_convexity(), n, m, d);
    const PhasedConfig pc2 = stage2_config(pc, plan);
    require_schedule(a + " stage 2", sco ? sco_schedule(pc2, n, m, d, 2 * plan.radius)
                                         : erm_schedule(pc2, n, m, d, 2 * plan.radius));
  }
}

}  // namespace

std::vector<ExperimentRecord> run_experiment(const ExperimentConfig& cfg,
                                             int threads) {
  const UserDataset ds = generate_dataset(cfg);
  const Index n = ds.num_users(), m = ds.items_per_user(), d = ds.dim();
  const LossPtr loss = make_loss(cfg.loss, cfg.R, cfg.data, d);
  const FeasibleRegion K = std::isfinite(cfg.R)
                               ? FeasibleRegion::ball(Vector::Zero(d), cfg.R)
                               : FeasibleRegion::unbounded(d);
  validate_preconditions(cfg, *loss, n, m, d, K.diameter());

  std::optional<double> best_loss;
  if (loss->strong_convexity() > 0) {
    SolverConfig sc;
    sc.tol_param = 1e-10;
    sc.max_iters = cfg.max_iters;
    try {
      best_loss = empirical_loss(
          *loss, ds, erm_minimize(RegularizedObjective(loss), ds, K, sc));
    } catch (const SolverError& e) {
      best_loss = empirical_loss(*loss, ds, e.best_iterate());
    }
  }
  // Population excess for the squared loss on truncated-Gaussian data:
  // zeta (|theta - chi_tr|^2 - |P_K(chi_tr) - chi_tr|^2).
  std::optional<Vector> chi_tr;
  double zeta = 0, pop_floor = 0;
  if (loss->name() == "squared" && generator_of(cfg.data) == "trunc-gauss") {
    TruncatedGaussianSpec spec;
    spec.chi = vector_param(cfg.data, "chi", d, 0, false);
    spec.sigma = number(cfg.data, "sigma", 1);
    spec.B = radius(cfg.data, "B");
    chi_tr = truncated_gaussian_mean(spec);
    zeta = loss->strong_convexity() / 2;
    pop_floor = zeta * (K.project(*chi_tr) - *chi_tr).squaredNorm();
  }

  const std::uint64_t hash = config_hash(cfg);
  std::vector<ExperimentRecord> records(cfg.seeds.size());
  auto run_one = [&](std::size_t k) {
    ExperimentRecord& rec = records[k];
    rec.config_hash = hash;
    rec.seed = cfg.seeds[k];
    const auto start = std::chrono::steady_clock::now();
    try {
      RandomSource root(rec.seed);
      RandomSource prng = root.child("permute");
      RandomSource mrng = root.child("mechanism");
      const UserDataset x = permute(ds, prng).data;
      std::optional<MechanismResult> r;
      const std::string& a = cfg.algorithm;
      if (a == "phased-erm") {
        r = phased_erm(loss, x, K, phased_config(cfg, *loss), mrng);
      } else if (a == "phased-sco") {
        r = phased_sco(loss, x, K, phased_config(cfg, *loss), mrng);
      } else if (a == "sc-erm") {
        r = strongly_convex_erm(loss, x, K, phased_config(cfg, *loss), mrng);
      } else if (a == "sc-sco") {
        r = strongly_convex_sco(loss, x, K, phased_config(cfg, *loss), mrng);
      } else if (a == "sc-output-pert") {
        r = sc_output_pert(loss, x, K, sc_config(cfg, *loss, n, m), mrng);
      } else {
        DelOutputPertConfig dc(PrivacyParams(cfg.eps, cfg.delta),
                               *cfg.target_sensitivity, cfg.mode);
        dc.enumeration_budget = cfg.enumeration_budget;
        dc.non_private = cfg.non_private;
        r = del_output_pert(mean_subset_map(x), n, dc, mrng, {}, &K);
      }
      if (r->is_bottom()) {
        rec.result = "bottom";
        rec.bottom = true;
        rec.phase_fail = r->trace().failed_phase;
        if (!rec.phase_fail && r->trace().stage == "stage1") rec.phase_fail = 0;
      } else {
        rec.result = cfg.non_private ? "released-nonprivate" : "released";
        const Vector& theta = r->theta();
        if (best_loss) rec.excess_emp = empirical_loss(*loss, ds, theta) - *best_loss;
        if (chi_tr) rec.excess_pop = zeta * (theta - *chi_tr).squaredNorm() - pop_floor;
      }
    } catch (const std::exception& e) {
      rec.result = "error";
      rec.error = e.what();
    }
    if (cfg.timing) {
      rec.ms = std::chrono::duration<double, std::milli>(
                   std::chrono::steady_clock::now() - start)
                   .count();
    }
  };

  const int workers = std::max(
      1, std::min<int>(threads > 0 ? threads : worker_threads(),
                       static_cast<int>(records.size())));
  std::atomic<std::size_t> next{0};
  auto loop = [&] {
    for (std::size_t k = next++; k < records.size(); k = next++) run_one(k);
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < workers; ++t) pool.emplace_back(loop);
  loop();
  for (auto& t : pool) t.join();

  std::sort(records.begin(), records.end(),
            [](const ExperimentRecord& a, const ExperimentRecord& b) {
              return std::tie(a.config_hash, a.seed) < std::tie(b.config_hash, b.seed);
            });
  return records;
}

namespace {

std::string fmt(const std::optional<double>& v) {
  if (!v || std::isnan(*v)) return "";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", *v);
  return buf;
}

const char* kRecordHeader =
    "config_hash,seed,result,excess_emp,excess_pop,bottom,phase_fail,ms";

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string f;
  while (std::getline(ss, f, ',')) out.push_back(f);
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

std::optional<double> parse_opt(const std::string& s) {
  if (s.empty()) return std::nullopt;
  try {
    return std::stod(s);
  } catch (const std::exception&) {
    throw DataError("bad number '" + s + "' in records");
  }
}

}  // namespace

void write_records_csv(std::ostream& out,
                       const std::vector<ExperimentRecord>& records) {
  out << kRecordHeader << '\n';
  for (const auto& r : records) {
    out << hash_hex(r.config_hash) << ',' << r.seed << ',' << r.result << ','
        << fmt(r.excess_emp) << ',' << fmt(r.excess_pop) << ','
        << (r.bottom ? 1 : 0) << ','
        << (r.phase_fail ? std::to_string(*r.phase_fail) : "") << ','
        << fmt(r.ms) << '\n';
  }
}

std::vector<ExperimentRecord> read_records_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kRecordHeader)
    throw DataError("records file must start with the header " + std::string(kRecordHeader));
  std::vector<ExperimentRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != 8) throw DataError("records row needs 8 fields: " + line);
    ExperimentRecord r;
    try {
      r.config_hash = std::stoull(f[0], nullptr, 16);
      r.seed = std::stoull(f[1]);
    } catch (const std::exception&) {
      throw DataError("bad hash or seed in records row: " + line);
    }
    r.result = f[2];
    r.excess_emp = parse_opt(f[3]);
    r.excess_pop = parse_opt(f[4]);
    r.bottom = f[5] == "1";
    if (!f[6].empty()) r.phase_fail = std::stoi(f[6]);
    r.ms = parse_opt(f[7]);
    out.push_back(std::move(r));
  }
  return out;
}

Json records_metadata(const std::vector<ExperimentConfig>& configs) {
  Json meta = Json::object();
  for (const auto& c : configs) {
    Json entry;
    entry["config"] = canonical_json(c);
    entry["labels"] = c.labels;
    entry["non_private"] = c.non_private;
    meta[hash_hex(config_hash(c))] = entry;
  }
  return meta;
}

std::vector<SummaryRow> summarize(const std::vector<ExperimentRecord>& records,
                                  const Json& metadata,
                                  const std::vector<std::string>& keys) {
  if (records.empty()) throw ArgumentError("summarize needs at least one record");
  struct Acc {
    long count = 0, released = 0, errors = 0, bottoms = 0;
    std::vector<double> emp, pop, ms;
  };
  std::map<std::vector<std::string>, Acc> groups;
  for (const auto& r : records) {
    const std::string h = hash_hex(r.config_hash);
    std::vector<std::string> key;
    for (const auto& k : keys) {
      if (k == "config_hash") {
        key.push_back(h);
        continue;
      }
      const Json* entry = metadata.contains(h) ? &metadata[h] : nullptr;
      if (entry && (*entry)["config"].contains(k)) {
        const Json& v = (*entry)["config"][k];
        key.push_back(v.is_string() ? v.get<std::string>() : v.dump());
      } else if (entry && (*entry)["labels"].contains(k)) {
        const Json& v = (*entry)["labels"][k];
        key.push_back(v.is_string() ? v.get<std::string>() : v.dump());
      } else {
        throw ArgumentError("no value for group key '" + k + "' (config " + h + ")");
      }
    }
    Acc& a = groups[key];
    ++a.count;
    if (r.result.rfind("released", 0) == 0) ++a.released;
    if (r.result == "error") ++a.errors;
    if (r.bottom) ++a.bottoms;
    if (r.excess_emp) a.emp.push_back(*r.excess_emp);
    if (r.excess_pop) a.pop.push_back(*r.excess_pop);
    if (r.ms) a.ms.push_back(*r.ms);
  }
  std::vector<SummaryRow> rows;
  for (auto& [key, a] : groups) {
    SummaryRow row;
    row.key = key;
    row.count = a.count;
    row.released = a.released;
    row.errors = a.errors;
    row.bottom_frequency = static_cast<double>(a.bottoms) / a.count;
    if (!a.emp.empty()) {
      row.mean_excess_emp = mean(a.emp);
      row.stderr_excess_emp = standard_error(a.emp);
    }
    if (!a.pop.empty()) {
      row.mean_excess_pop = mean(a.pop);
      row.stderr_excess_pop = standard_error(a.pop);
    }
    if (!a.ms.empty()) {
      row.ms_p50 = percentile(a.ms, 0.5);
      row.ms_p95 = percentile(a.ms, 0.95);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_summary_csv(std::ostream& out, const std::vector<std::string>& keys,
                       const std::vector<SummaryRow>& rows) {
  for (const auto& k : keys) out << k << ',';
  out << "count,released,errors,bottom_frequency,mean_excess_emp,"
         "stderr_excess_emp,mean_excess_pop,stderr_excess_pop,ms_p50,ms_p95\n";
  for (const auto& r : rows) {
    for (const auto& k : r.key) out << k << ',';
    out << r.count << ',' << r.released << ',' << r.errors << ','
        << fmt(r.bottom_frequency) << ',' << fmt(r.mean_excess_emp) << ','
        << fmt(r.stderr_excess_emp) << ',' << fmt(r.mean_excess_pop) << ','
        << fmt(r.stderr_excess_pop) << ',' << fmt(r.ms_p50) << ','
        << fmt(r.ms_p95) << '\n';
  }
}

Json summary_json(const std::vector<std::string>& keys,
                  const std::vector<SummaryRow>& rows) {
  auto num = [](double v) { return std::isnan(v) ? Json(nullptr) : Json(v); };
  Json out = Json::array();
  for (const auto& r : rows) {
    Json j;
    for (std::size_t i = 0; i < keys.size(); ++i) j["group"][keys[i]] = r.key[i];
    j["count"] = r.count;
    j["released"] = r.released;
    j["errors"] = r.errors;
    j["bottom_frequency"] = r.bottom_frequency;
    j["mean_excess_emp"] = num(r.mean_excess_emp);
    j["stderr_excess_emp"] = num(r.stderr_excess_emp);
    j["mean_excess_pop"] = num(r.mean_excess_pop);
    j["stderr_excess_pop"] = num(r.stderr_excess_pop);
    j["ms_p50"] = num(r.ms_p50);
    j["ms_p95"] = num(r.ms_p95);
    out.push_back(j);
  }
  return out;
}

namespace {

// Fewest trials whose Wilson upper bound can drop below beta with zero
// exceedances.
long enough_trials(double beta) {
  return static_cast<long>(std::ceil(kZ95 * kZ95 / beta));
}

}  // namespace

Json verify_suite(bool quick, std::uint64_t seed) {
  const long scale = quick ? 10 : 1;
  RandomSource root(seed);
  Json checks = Json::array();
  auto add = [&](Json c) { checks.push_back(std::move(c)); };
  auto trial = [](const char* name, const TrialReport& r, double beta) {
    Json c;
    c["name"] = name;
    c["beta"] = beta;
    c["exceed"] = r.exceed.successes;
    c["trials"] = r.exceed.trials;
    c["wilson_upper"] = r.exceed.upper;
    c["max_ratio"] = r.max_ratio;
    c["passed"] = r.exceed.upper <= beta;
    return c;
  };

  {
    const TDLap t(1, std::exp(-2.0));
    double sum = 0, worst_ratio = 0;
    for (double p : t.pmf_table()) sum += p;
    for (int x = 0; x < t.support_max(); ++x) {
      const double expect = x < t.kappa() ? std::exp(1.0) : std::exp(-1.0);
      worst_ratio = std::max(worst_ratio, std::abs(t.pmf(x + 1) / t.pmf(x) - expect));
    }
    RandomSource rng = root.child("tdlap");
    const long samples = 1000000;
    std::vector<long> hist(t.support_max() + 1, 0);
    for (long i = 0; i < samples; ++i) ++hist[t.sample(rng)];
    double tv = 0;
    for (int x = 0; x <= t.support_max(); ++x)
      tv += std::abs(static_cast<double>(hist[x]) / samples - t.pmf(x));
    tv /= 2;
    Json c;
    c["name"] = "tdlap";
    c["pmf_sum_error"] = std::abs(sum - 1);
    c["ratio_error"] = worst_ratio;
    c["tv"] = tv;
    c["passed"] = std::abs(sum - 1) <= 1e-12 && worst_ratio <= 1e-12 && tv <= 0.005;
    add(c);
  }
  {
    const ScanResult s = neighbor_stability_scan(
        [](const UserDataset& ds) { return mean_subset_map(ds); }, {0, 1, 3},
        4, 2, {0.1, 0.5, 2}, 1);
    Json c;
    c["name"] = "neighbor-stability";
    c["datasets"] = s.datasets;
    c["pairs"] = s.pairs;
    c["violations"] = s.violations;
    c["passed"] = s.violations == 0;
    add(c);
  }
  for (double beta : {0.1, 0.05}) {
    RandomSource rng = root.child("permutation").child(static_cast<std::uint64_t>(beta * 1000));
    const Index N = 200, d = 10;
    Eigen::MatrixXd v(N, d);
    for (Index i = 0; i < N / 2; ++i) {
      Vector g = gaussian_vector(d, 1, rng);
      g /= g.norm();
      v.row(2 * i) = g.transpose();
      v.row(2 * i + 1) = -g.transpose();
    }
    add(trial("permutation-concentration",
              permutation_concentration_trial(v, 20, 1, 10000 / scale, beta, rng),
              beta));
  }
  for (double beta : {0.1, 0.01}) {
    RandomSource rng = root.child("deletion").child(static_cast<std::uint64_t>(beta * 1000));
    const double zeta = 0.5, G = 1;
    const UserDataset ds = two_cluster_dataset(50, 100, 5, G / (2 * zeta));
    add(trial("deletion-stability",
              deletion_stability_trial(make_squared_loss(zeta, G), ds,
                                       std::max(1000 / scale, enough_trials(beta)),
                                       beta, rng),
              beta));
  }
  {
    RandomSource rng = root.child("certificate");
    const SoundnessReport s = certificate_soundness_check(100, rng);
    Json c;
    c["name"] = "certificate-soundness";
    c["instances"] = s.instances;
    c["violations"] = s.violations;
    c["max_ratio"] = s.max_ratio;
    c["passed"] = s.violations == 0;
    add(c);
  }
  {
    RandomSource rng = root.child("prop2");
    TruncatedGaussianSpec spec;
    spec.chi = Vector::Zero(5);
    spec.chi(0) = 0.5;
    spec.sigma = 0.5;
    spec.B = 1;
    // Items and parameters stay in the unit ball: G = 2 zeta * 2.
    add(trial("erm-closeness",
              erm_closeness_trial(spec, 0.5, 2, 100, 50, 1000 / scale, 0.05, rng),
              0.05));
  }
  {
    Json c;
    c["name"] = "budget-audit";
    long checked = 0;
    Json mismatches = Json::array();
    const PhasedConfig pc(PrivacyParams(1, 1e-5), 1);
    const Index n = 2000, m = 16, d = 10;
    const double diameter = 2;
    auto note = [&](const std::string& tag, const AuditReport& r) {
      checked += r.checked;
      for (const auto& s : r.mismatches) mismatches.push_back(tag + ": " + s);
    };
    note("phased-erm", budget_audit(erm_schedule(pc, n, m, d, diameter), pc, diameter));
    note("phased-sco", budget_audit(sco_schedule(pc, n, m, d, diameter), pc, diameter));
    for (bool sco : {false, true}) {
      const ReductionPlan plan = reduction_plan(sco, pc, 1, n, m, d);
      const PhasedConfig pc2 = stage2_config(pc, plan);
      const PhasedSchedule s2 = sco ? sco_schedule(pc2, n, m, d, 2 * plan.radius)
                                    : erm_schedule(pc2, n, m, d, 2 * plan.radius);
      note(sco ? "sc-sco" : "sc-erm", budget_audit(plan, s2, pc, n, m, d));
    }
    c["checked"] = checked;
    c["mismatches"] = mismatches;
    c["passed"] = mismatches.empty();
    add(c);
  }
  long failures = 0;
  for (const auto& c : checks) failures += c["passed"].get<bool>() ? 0 : 1;
  Json report;
  report["seed"] = seed;
  report["quick"] = quick;
  report["checks"] = checks;
  report["violations"] = failures;
  return report;
}

}  // namespace userdp
