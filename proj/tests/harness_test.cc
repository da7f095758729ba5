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

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "userdp/errors.h"
#include "userdp/harness.h"

namespace userdp {
namespace {

Json base_config() {
  return Json::parse(R"({
    "algorithm": "sc-output-pert",
    "loss": {"name": "squared", "zeta": 0.5},
    "n": 100, "m": 4, "d": 2,
    "eps": 1, "delta": 0.1,
    "R": 1,
    "data": {"generator": "trunc-gauss", "chi": [0.5, 0], "sigma": 0.05, "B": 1, "seed": 3},
    "seeds": [0, 1, 2, 3]
  })");
}

TEST(ParseConfigTest, AcceptsBaseConfig) {
  const ExperimentConfig c = parse_config(base_config());
  EXPECT_EQ(c.algorithm, "sc-output-pert");
  EXPECT_EQ(c.seeds.size(), 4u);
  EXPECT_EQ(c.mode, ProbeMode::kCertificate);
  EXPECT_TRUE(c.timing);
}

TEST(ParseConfigTest, RejectsBadFields) {
  auto rejects = [](const char* key, Json value) {
    Json j = base_config();
    j[key] = std::move(value);
    return j;
  };
  EXPECT_THROW(parse_config(rejects("eps", 1.5)), ArgumentError);
  EXPECT_THROW(parse_config(rejects("eps", 0)), ArgumentError);
  EXPECT_THROW(parse_config(rejects("delta", 0.6)), ArgumentError);
  EXPECT_THROW(parse_config(rejects("algorithm", "sgd")), ArgumentError);
  EXPECT_THROW(parse_config(rejects("bogus", 1)), ArgumentError);
  EXPECT_THROW(parse_config(rejects("mode", "fast")), ArgumentError);
  EXPECT_THROW(parse_config(rejects("seeds", Json::array())), ArgumentError);
  EXPECT_THROW(parse_config(rejects("loss", Json::parse(R"({"name": "distance"})"))),
               ConfigError);
  Json no_radius = base_config();
  no_radius["algorithm"] = "phased-erm";
  no_radius.erase("R");
  no_radius["loss"]["G"] = 2;
  EXPECT_THROW(parse_config(no_radius), ConfigError);
}

TEST(ParseConfigTest, SeedRangeAndArrays) {
  Json j = base_config();
  j["seeds"] = Json::parse(R"({"start": 5, "count": 3})");
  EXPECT_EQ(parse_config(j).seeds, (std::vector<std::uint64_t>{5, 6, 7}));
  EXPECT_EQ(parse_config_document(Json::array({base_config(), base_config()})).size(), 2u);
}

TEST(ConfigHashTest, IgnoresSeedsAndOutput) {
  Json a = base_config(), b = base_config();
  b["seeds"] = {9};
  b["output"] = "elsewhere.csv";
  EXPECT_EQ(config_hash(parse_config(a)), config_hash(parse_config(b)));
  b["m"] = 8;
  EXPECT_NE(config_hash(parse_config(a)), config_hash(parse_config(b)));
  EXPECT_EQ(hash_hex(0xabc).size(), 16u);
}

TEST(MakeLossTest, SquaredLossDefaultG) {
  const ExperimentConfig c = parse_config(base_config());
  const LossPtr loss = make_loss(c.loss, c.R, c.data, c.d);
  EXPECT_EQ(loss->lipschitz(), 2 * 0.5 * (1 + 1));
  EXPECT_EQ(loss->strong_convexity(), 1);
}

TEST(GenerateDatasetTest, IdenticalHasZeroSensitivity) {
  RandomSource rng(1);
  const UserDataset ds = generate_dataset(
      Json::parse(R"({"generator": "identical", "value": [1, 2]})"), 6, 3, 2, rng);
  EXPECT_EQ(delsen_exact([](const UserDataset& x) { return x.mean(); }, ds), 0);
}

TEST(GenerateDatasetTest, TinyTruncationMostlyZero) {
  RandomSource rng(2);
  const UserDataset ds = generate_dataset(
      Json::parse(R"({"generator": "trunc-gauss", "sigma": 1, "B": 0.01})"), 100, 10, 10,
      rng);
  long zeros = 0;
  for (Index k = 0; k < ds.num_items(); ++k) zeros += ds.items().row(k).isZero(0);
  EXPECT_GE(zeros, 990);
}

TEST(GenerateDatasetTest, CsvRoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "userdp_harness_rt.csv";
  ExperimentConfig c = parse_config(base_config());
  const UserDataset ds = generate_dataset(c);
  {
    std::ofstream out(path);
    write_dataset_csv(out, ds);
  }
  RandomSource rng(0);
  const UserDataset back = generate_dataset(
      Json{{"generator", "csv"}, {"path", path.string()}}, 100, 4, 2, rng);
  EXPECT_EQ(back.items(), ds.items());
  std::filesystem::remove(path);
}

TEST(RunExperimentTest, DeterministicCsv) {
  const ExperimentConfig c = parse_config([] {
    Json j = base_config();
    j["timing"] = false;
    return j;
  }());
  std::ostringstream a, b;
  write_records_csv(a, run_experiment(c, 3));
  write_records_csv(b, run_experiment(c, 1));
  EXPECT_EQ(a.str(), b.str());
  EXPECT_EQ(a.str().substr(0, a.str().find('\n')),
            "config_hash,seed,result,excess_emp,excess_pop,bottom,phase_fail,ms");
}

TEST(RunExperimentTest, NonPrivateControlIsExact) {
  Json j = base_config();
  j["non_private"] = true;
  const auto records = run_experiment(parse_config(j));
  ASSERT_EQ(records.size(), 4u);
  for (const auto& r : records) {
    EXPECT_EQ(r.result, "released-nonprivate");
    ASSERT_TRUE(r.excess_emp.has_value());
    EXPECT_LE(std::abs(*r.excess_emp), 1e-9);
    ASSERT_TRUE(r.excess_pop.has_value());
    EXPECT_GE(*r.excess_pop, -1e-9);
  }
}

TEST(RunExperimentTest, PrivateRecordsAreSorted) {
  Json j = base_config();
  j["seeds"] = {7, 3, 5};
  const auto records = run_experiment(parse_config(j));
  ASSERT_EQ(records.size(), 3u);
  EXPECT_EQ(records[0].seed, 3u);
  EXPECT_EQ(records[2].seed, 7u);
  for (const auto& r : records) {
    EXPECT_TRUE(r.result == "released" || r.result == "bottom") << r.error;
    if (r.excess_emp) EXPECT_GE(*r.excess_emp, -1e-9);
    EXPECT_TRUE(r.ms.has_value());
  }
}

TEST(RunExperimentTest, TooFewUsersRejected) {
  Json j = base_config();
  j["n"] = 10;
  EXPECT_THROW(run_experiment(parse_config(j)), ConfigError);
}

TEST(RecordsCsvTest, RoundTrip) {
  std::vector<ExperimentRecord> in(2);
  in[0].config_hash = 42;
  in[0].seed = 1;
  in[0].result = "released";
  in[0].excess_emp = 0.125;
  in[0].ms = 3.5;
  in[1].config_hash = 42;
  in[1].seed = 2;
  in[1].result = "bottom";
  in[1].bottom = true;
  in[1].phase_fail = 3;
  std::stringstream ss;
  write_records_csv(ss, in);
  const auto out = read_records_csv(ss);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].excess_emp, 0.125);
  EXPECT_FALSE(out[0].excess_pop.has_value());
  EXPECT_EQ(out[1].phase_fail, 3);
  EXPECT_TRUE(out[1].bottom);
  EXPECT_FALSE(out[1].ms.has_value());
}

TEST(SummarizeTest, SingleRecord) {
  ExperimentRecord r;
  r.config_hash = 1;
  r.result = "released";
  r.excess_emp = 0.5;
  const auto rows = summarize({r}, Json::object(), {"config_hash"});
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].mean_excess_emp, 0.5);
  EXPECT_EQ(rows[0].stderr_excess_emp, 0);
  EXPECT_THROW(summarize({}, Json::object(), {"config_hash"}), ArgumentError);
}

TEST(SummarizeTest, GroupsByMAndCountsBottoms) {
  Json a = base_config(), b = base_config();
  b["m"] = 8;
  const std::vector<ExperimentConfig> configs = {parse_config(a), parse_config(b)};
  const Json meta = records_metadata(configs);
  std::vector<ExperimentRecord> recs;
  for (int k = 0; k < 5; ++k) {
    ExperimentRecord r;
    r.config_hash = config_hash(configs[k % 2]);
    r.seed = k;
    r.bottom = k == 0 || k == 2;
    r.result = r.bottom ? "bottom" : "released";
    recs.push_back(r);
  }
  const auto rows = summarize(recs, meta, {"m"});
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].key[0], "4");
  EXPECT_EQ(rows[0].count, 3);
  EXPECT_NEAR(rows[0].bottom_frequency, 2.0 / 3, 1e-15);
  EXPECT_EQ(rows[1].bottom_frequency, 0);
  std::ostringstream csv;
  write_summary_csv(csv, {"m"}, rows);
  EXPECT_EQ(csv.str().rfind("m,count,", 0), 0u);
  EXPECT_EQ(summary_json({"m"}, rows).size(), 2u);
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() /
           ("userdp_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
            "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    std::filesystem::create_directories(dir_);
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }

  std::string write_config(const Json& j) {
    const auto p = dir_ / "config.json";
    std::ofstream(p) << j.dump();
    return p.string();
  }
  static int run(const std::string& args) {
    const std::string cmd = std::string(USERDP_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
  }
  static std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  std::filesystem::path dir_;
};

TEST_F(CliTest, RunIsByteDeterministic) {
  Json j = base_config();
  j["timing"] = false;
  const std::string cfg = write_config(j);
  const auto a = dir_ / "a.csv", b = dir_ / "b.csv";
  ASSERT_EQ(run("run -c " + cfg + " -o " + a.string()), 0);
  ASSERT_EQ(run("run -c " + cfg + " -o " + b.string() + " --threads 1"), 0);
  EXPECT_EQ(slurp(a), slurp(b));
  EXPECT_TRUE(std::filesystem::exists(a.string() + ".meta.json"));
  EXPECT_EQ(run("summarize -r " + a.string() + " --by m,algorithm --format json -o " +
                (dir_ / "s.json").string()),
            0);
  const Json s = Json::parse(slurp(dir_ / "s.json"));
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s[0]["count"], 4);
}

TEST_F(CliTest, ExitCodes) {
  EXPECT_EQ(run("frobnicate"), 2);
  EXPECT_EQ(run("run -c " + (dir_ / "missing.json").string()), 2);
  Json bad = base_config();
  bad["eps"] = 3;
  EXPECT_EQ(run("run -c " + write_config(bad)), 2);
  Json few = base_config();
  few["n"] = 10;
  EXPECT_EQ(run("run -c " + write_config(few)), 2);
  Json audit = base_config();
  audit["mode"] = "exhaustive";
  audit["enumeration_budget"] = 10;
  EXPECT_EQ(run("sensitivity audit --r 3 -c " + write_config(audit)), 3);
  EXPECT_EQ(run("verify --quick --seed 5"), 0);
}

TEST_F(CliTest, AuditAndGenerate) {
  Json j = base_config();
  j["n"] = 8;
  j["mode"] = "exhaustive";
  const std::string cfg = write_config(j);
  const auto report = dir_ / "audit.json";
  ASSERT_EQ(run("sensitivity audit --r 2 -c " + cfg + " -o " + report.string()), 0);
  const Json r = Json::parse(slurp(report));
  EXPECT_EQ(r["method"], "exhaustive");
  EXPECT_LE(r["delsen_r"]["0"].get<double>(), r["delsen_r"]["2"].get<double>());
  const auto data = dir_ / "data.csv";
  ASSERT_EQ(run("generate -c " + cfg + " -o " + data.string()), 0);
  EXPECT_EQ(read_dataset_csv_file(data.string(), 4).num_users(), 8);
}

TEST_F(CliTest, OverridesApply) {
  Json j = base_config();
  j["timing"] = false;
  const std::string cfg = write_config(j);
  const auto out = dir_ / "o.csv";
  ASSERT_EQ(run("run -c " + cfg + " --seed-count 2 -o " + out.string()), 0);
  std::ifstream in(out);
  EXPECT_EQ(read_records_csv(in).size(), 2u);
}

}  // namespace
}  // namespace userdp
