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

#ifndef USERDP_HARNESS_H_
#define USERDP_HARNESS_H_

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "userdp/dataset.h"
#include "userdp/loss.h"
#include "userdp/random.h"
#include "userdp/sensitivity.h"

namespace userdp {

using Json = nlohmann::json;

inline constexpr const char* kAlgorithms[] = {
    "phased-erm", "phased-sco", "sc-erm", "sc-sco", "sc-output-pert",
    "del-output-pert"};

// One experiment: an algorithm, a loss, a dataset source and a list of
// seeds. Field names match the JSON document.
struct ExperimentConfig {
  std::string algorithm;
  Json loss;  // {"name": ..., "zeta"/"rho": ..., "G": ...}
  Index n = 0, m = 0, d = 0;
  double eps = 1;
  double delta = 1e-5;
  std::optional<double> beta;
  double R = std::numeric_limits<double>::infinity();  // radius of K
  Json data;  // {"generator": ..., params..., "seed": ...}
  std::vector<std::uint64_t> seeds;
  ProbeMode mode = ProbeMode::kCertificate;
  std::string output;

  std::optional<double> lambda;
  std::optional<double> target_sensitivity;  // del-output-pert
  double C = 10;
  double enumeration_budget = kDefaultEnumerationBudget;
  long max_iters = 200000;
  bool non_private = false;
  bool timing = true;
  Json labels = Json::object();
};

// Validates every field; throws ArgumentError or ConfigError.
ExperimentConfig parse_config(const Json& j);
// Config files hold one object or an array of them.
std::vector<ExperimentConfig> parse_config_document(const Json& j);

// Everything that determines a record except the seed, with sorted keys.
Json canonical_json(const ExperimentConfig& cfg);
std::uint64_t config_hash(const ExperimentConfig& cfg);
std::string hash_hex(std::uint64_t h);

// Squared loss without an explicit G gets 2 zeta (R + data bound).
LossPtr make_loss(const Json& loss, double R, const Json& data, Index d);

// Generators: trunc-gauss, two-cluster, identical, csv.
UserDataset generate_dataset(const Json& data, Index n, Index m, Index d,
                             RandomSource& rng);
UserDataset generate_dataset(const ExperimentConfig& cfg);

struct ExperimentRecord {
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
  std::string result;  // released, released-nonprivate, bottom, error
  std::optional<double> excess_emp;
  std::optional<double> excess_pop;
  bool bottom = false;
  std::optional<int> phase_fail;
  std::optional<double> ms;
  std::string error;  // not serialized
};

// Runs every seed, in parallel up to `threads` (0: worker_threads()).
// Per-seed errors are recorded, never thrown. Sorted by (hash, seed).
std::vector<ExperimentRecord> run_experiment(const ExperimentConfig& cfg,
                                             int threads = 0);

// USERDP_THREADS if set, else the hardware concurrency.
int worker_threads();

void write_records_csv(std::ostream& out,
                       const std::vector<ExperimentRecord>& records);
std::vector<ExperimentRecord> read_records_csv(std::istream& in);

// Per config hash: the canonical config and labels, for summarize.
Json records_metadata(const std::vector<ExperimentConfig>& configs);

struct SummaryRow {
  std::vector<std::string> key;
  long count = 0;
  long released = 0;
  long errors = 0;
  double mean_excess_emp = std::numeric_limits<double>::quiet_NaN();
  double stderr_excess_emp = std::numeric_limits<double>::quiet_NaN();
  double mean_excess_pop = std::numeric_limits<double>::quiet_NaN();
  double stderr_excess_pop = std::numeric_limits<double>::quiet_NaN();
  double bottom_frequency = 0;
  double ms_p50 = std::numeric_limits<double>::quiet_NaN();
  double ms_p95 = std::numeric_limits<double>::quiet_NaN();
};

// Groups by the named keys: "config_hash", any canonical config field
// ("m", "algorithm", ...) or label. Keys are looked up in metadata.
std::vector<SummaryRow> summarize(const std::vector<ExperimentRecord>& records,
                                  const Json& metadata,
                                  const std::vector<std::string>& keys);

void write_summary_csv(std::ostream& out, const std::vector<std::string>& keys,
                       const std::vector<SummaryRow>& rows);
Json summary_json(const std::vector<std::string>& keys,
                  const std::vector<SummaryRow>& rows);

// Runs the oracle suite; quick divides the Monte-Carlo trial counts by 10.
// {"checks": [{"name", "passed", ...}], "violations": count of failures}.
Json verify_suite(bool quick, std::uint64_t seed);

}  // namespace userdp

#endif  // USERDP_HARNESS_H_
