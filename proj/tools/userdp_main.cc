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

// Command-line front end: run, sensitivity audit, verify, summarize,
// generate.
//
// Exit codes: 0 success, 2 invalid input or configuration, 3 runtime
// failure, 4 verify found violations.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "userdp/errors.h"
#include "userdp/harness.h"
#include "userdp/sensitivity.h"
#include "userdp/solvers.h"

namespace {

using userdp::Json;

constexpr int kOk = 0;
constexpr int kInvalid = 2;
constexpr int kRuntime = 3;
constexpr int kViolations = 4;

Json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw userdp::DataError("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw userdp::DataError(path + ": " + e.what());
  }
}

// Flag values that override the config document.
struct Overrides {
  std::string output;
  std::vector<std::uint64_t> seeds;
  long seed_count = 0;
  long n = 0, m = 0, d = 0;
  double eps = 0, delta = 0;
  std::string mode;

  void apply(Json& j) const {
    if (!output.empty()) j["output"] = output;
    if (!seeds.empty()) j["seeds"] = seeds;
    if (seed_count > 0) j["seeds"] = {{"start", 0}, {"count", seed_count}};
    if (n > 0) j["n"] = n;
    if (m > 0) j["m"] = m;
    if (d > 0) j["d"] = d;
    if (eps > 0) j["eps"] = eps;
    if (delta > 0) j["delta"] = delta;
    if (!mode.empty()) j["mode"] = mode;
  }
};

void add_overrides(CLI::App* app, Overrides& o) {
  app->add_option("--output,-o", o.output, "Output path (overrides the config)");
  app->add_option("--seeds", o.seeds, "Explicit seed list")->delimiter(',');
  app->add_option("--seed-count", o.seed_count, "Seeds 0..N-1");
  app->add_option("--n", o.n, "Users");
  app->add_option("--m", o.m, "Items per user");
  app->add_option("--d", o.d, "Dimension");
  app->add_option("--eps", o.eps, "Privacy epsilon");
  app->add_option("--delta", o.delta, "Privacy delta");
  app->add_option("--mode", o.mode, "certificate or exhaustive");
}

std::vector<userdp::ExperimentConfig> load_configs(const std::string& path,
                                                   const Overrides& o) {
  Json doc = load_json(path);
  if (doc.is_array()) {
    for (auto& e : doc) o.apply(e);
  } else {
    o.apply(doc);
  }
  return userdp::parse_config_document(doc);
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw userdp::DataError("cannot write " + path);
  out << text;
}

int cmd_run(const std::string& config_path, const Overrides& o, int threads) {
  const auto configs = load_configs(config_path, o);
  std::vector<userdp::ExperimentRecord> all;
  for (const auto& cfg : configs) {
    if (cfg.non_private) {
      std::cerr << "WARNING: config " << userdp::hash_hex(userdp::config_hash(cfg))
                << " runs in NON-PRIVATE control mode\n";
    }
    auto records = userdp::run_experiment(cfg, threads);
    for (const auto& r : records) {
      if (r.result == "error") {
        std::cerr << "seed " << r.seed << ": " << r.error << '\n';
      }
    }
    all.insert(all.end(), records.begin(), records.end());
  }
  std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
    return std::tie(a.config_hash, a.seed) < std::tie(b.config_hash, b.seed);
  });
  std::ostringstream csv;
  userdp::write_records_csv(csv, all);
  const std::string out = configs.front().output;
  write_text(out, csv.str());
  if (!out.empty() && out != "-") {
    write_text(out + ".meta.json", userdp::records_metadata(configs).dump(2) + "\n");
  }
  return kOk;
}

int cmd_audit(const std::string& config_path, const Overrides& o, int max_r) {
  const auto configs = load_configs(config_path, o);
  const auto& cfg = configs.front();
  const userdp::UserDataset ds = userdp::generate_dataset(cfg);
  const userdp::LossPtr loss =
      userdp::make_loss(cfg.loss, cfg.R, cfg.data, ds.dim());
  const userdp::FeasibleRegion K =
      std::isfinite(cfg.R)
          ? userdp::FeasibleRegion::ball(userdp::Vector::Zero(ds.dim()), cfg.R)
          : userdp::FeasibleRegion::unbounded(ds.dim());
  userdp::SolverConfig sc;
  sc.tol_param = 1e-10;
  sc.max_iters = cfg.max_iters;
  const auto report = userdp::sensitivity_report(
      userdp::RegularizedObjective(loss), ds, K, max_r, cfg.mode, sc,
      cfg.enumeration_budget);
  Json j;
  j["method"] = report.method == userdp::ProbeMode::kExhaustive ? "exhaustive"
                                                                : "certificate";
  j["delsen"] = report.delsen;
  for (const auto& [r, v] : report.delsen_r) j["delsen_r"][std::to_string(r)] = v;
  j["gamma"] = report.gamma ? Json(*report.gamma) : Json(nullptr);
  j["n"] = ds.num_users();
  j["m"] = ds.items_per_user();
  j["d"] = ds.dim();
  write_text(o.output, j.dump(2) + "\n");
  return kOk;
}

int cmd_verify(bool quick, std::uint64_t seed, const std::string& output) {
  const Json report = userdp::verify_suite(quick, seed);
  write_text(output, report.dump(2) + "\n");
  return report["violations"].get<long>() == 0 ? kOk : kViolations;
}

int cmd_summarize(const std::string& records_path, std::string meta_path,
                  const std::vector<std::string>& keys,
                  const std::string& format, const std::string& output) {
  std::ifstream in(records_path);
  if (!in) throw userdp::DataError("cannot open " + records_path);
  const auto records = userdp::read_records_csv(in);
  if (meta_path.empty()) meta_path = records_path + ".meta.json";
  Json meta = Json::object();
  if (std::ifstream probe(meta_path); probe) meta = load_json(meta_path);
  const auto rows = userdp::summarize(records, meta, keys);
  if (format == "json") {
    write_text(output, userdp::summary_json(keys, rows).dump(2) + "\n");
  } else {
    std::ostringstream csv;
    userdp::write_summary_csv(csv, keys, rows);
    write_text(output, csv.str());
  }
  return kOk;
}

int cmd_generate(const std::string& config_path, const Overrides& o) {
  const auto configs = load_configs(config_path, o);
  const userdp::UserDataset ds = userdp::generate_dataset(configs.front());
  std::ostringstream csv;
  userdp::write_dataset_csv(csv, ds);
  write_text(o.output, csv.str());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"User-level differentially private convex optimization"};
  app.require_subcommand(1);

  std::string config_path;
  Overrides overrides;
  int threads = 0;
  auto* run = app.add_subcommand("run", "Run an experiment sweep");
  run->add_option("--config,-c", config_path, "JSON config")->required();
  run->add_option("--threads", threads, "Worker threads (default USERDP_THREADS or cores)");
  add_overrides(run, overrides);

  auto* sens = app.add_subcommand("sensitivity", "Deletion-sensitivity tools");
  sens->require_subcommand(1);
  int max_r = 1;
  auto* audit = sens->add_subcommand("audit", "Report delsen_r of the ERM minimizer");
  audit->add_option("--config,-c", config_path, "JSON config")->required();
  audit->add_option("--r", max_r, "Largest r to report")->check(CLI::NonNegativeNumber);
  add_overrides(audit, overrides);

  bool quick = false;
  std::uint64_t verify_seed = 1;
  std::string verify_out;
  auto* verify = app.add_subcommand("verify", "Run the oracle suite");
  verify->add_flag("--quick", quick, "Tenfold fewer Monte-Carlo trials");
  verify->add_option("--seed", verify_seed, "Seed");
  verify->add_option("--output,-o", verify_out, "Report path (default stdout)");

  std::string records_path, meta_path, format = "csv", summary_out;
  std::vector<std::string> keys{"config_hash"};
  auto* summarize = app.add_subcommand("summarize", "Aggregate records");
  summarize->add_option("--records,-r", records_path, "Records CSV")->required();
  summarize->add_option("--meta", meta_path, "Metadata JSON (default <records>.meta.json)");
  summarize->add_option("--by", keys, "Group keys")->delimiter(',');
  summarize->add_option("--format", format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  summarize->add_option("--output,-o", summary_out, "Output path (default stdout)");

  auto* generate = app.add_subcommand("generate", "Write a config's dataset as CSV");
  generate->add_option("--config,-c", config_path, "JSON config")->required();
  add_overrides(generate, overrides);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalid;
  }

  try {
    if (*run) return cmd_run(config_path, overrides, threads);
    if (*audit) return cmd_audit(config_path, overrides, max_r);
    if (*verify) return cmd_verify(quick, verify_seed, verify_out);
    if (*summarize)
      return cmd_summarize(records_path, meta_path, keys, format, summary_out);
    if (*generate) return cmd_generate(config_path, overrides);
  } catch (const userdp::ArgumentError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalid;
  } catch (const userdp::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalid;
  } catch (const userdp::DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntime;
  }
  return kOk;
}
