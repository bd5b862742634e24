/*
 * Copyright 2026 The PIA Lab Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.h"
#include "gtest/gtest.h"

namespace pia::cli {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome Invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "pia");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code =
      Run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path Fresh(const std::string& name) {
  const fs::path dir = fs::path(testing::TempDir()) / name;
  fs::remove_all(dir);
  return dir;
}

TEST(CliTest, HelpAndUsageErrors) {
  EXPECT_EQ(Invoke({"--help"}).code, 0);
  EXPECT_EQ(Invoke({}).code, 1);
  EXPECT_EQ(Invoke({"frobnicate"}).code, 1);
  EXPECT_EQ(Invoke({"--preset", "huge", "describe"}).code, 1);
  EXPECT_EQ(Invoke({"farm", "--out", "x"}).code, 1);  // missing --arch
}

TEST(CliTest, DescribeArchitectures) {
  const Outcome o = Invoke({"describe", "--arch", "A9", "--size", "64"});
  EXPECT_EQ(o.code, 0) << o.err;
  EXPECT_NE(o.out.find("5857"), std::string::npos) << o.out;
  const Outcome bad = Invoke({"describe", "--arch", "A1", "--size", "8"});
  EXPECT_EQ(bad.code, 1);
  EXPECT_NE(bad.err.find("Conv2"), std::string::npos) << bad.err;
}

TEST(CliTest, ConfigValueErrorsAreUsage) {
  EXPECT_EQ(Invoke({"run-all", "--out", Fresh("pia_cli_gate").string(),
                    "--gate", "2"})
                .code,
            1);
  EXPECT_EQ(Invoke({"describe", "--arch", "A12"}).code, 1);
}

TEST(CliTest, GenDataThenFarmThenAttackThenReport) {
  const fs::path dir = Fresh("pia_cli_pipeline");
  const std::string pool = (dir / "pool").string();
  const std::string recs = (dir / "a9.pia").string();
  const std::string results = (dir / "a9.jsonl").string();
  Outcome o = Invoke({"-q", "gen-data", "--out", pool, "--size", "16",
                      "--pool", "600"});
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_TRUE(fs::exists(fs::path(pool) / "manifest.json"));
  o = Invoke({"-q", "--workers", "2", "farm", "--arch", "A9", "--data", pool,
              "--out", recs, "--size", "16", "--k", "12", "--n", "30",
              "--epochs", "2", "--gate", "0.3"});
  ASSERT_EQ(o.code, 0) << o.err;
  o = Invoke({"-q", "attack", "--records", recs, "--out", results, "--reps",
              "2", "--attack-epochs", "2", "--tuned"});
  ASSERT_EQ(o.code, 0) << o.err;
  o = Invoke({"-q", "report", "--results", results, "--records", recs, "--out",
              (dir / "report").string()});
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_TRUE(fs::exists(dir / "report" / "report.json"));
  o = Invoke({"-q", "grid-search", "--records", recs, "--repeats", "1",
              "--grid-epochs", "1", "--lrs", "0.005", "--batches", "32",
              "--losses", "mse", "--optimizers", "adam", "--activations",
              "relu,tanh"});
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_NE(o.out.find("validation_accuracy"), std::string::npos) << o.out;
}

TEST(CliTest, DataErrorsExitTwo) {
  const fs::path dir = Fresh("pia_cli_data");
  fs::create_directories(dir);
  std::ofstream(dir / "junk.pia") << "not a record file";
  EXPECT_EQ(Invoke({"attack", "--records", (dir / "junk.pia").string()}).code,
            2);
  EXPECT_EQ(Invoke({"farm", "--arch", "A9", "--data",
                    (dir / "missing").string(), "--out",
                    (dir / "x.pia").string()})
                .code,
            2);
}

TEST(CliTest, UnreachableGateExitsThree) {
  const fs::path dir = Fresh("pia_cli_gate3");
  const Outcome o = Invoke(
      {"-q", "farm", "--arch", "A9", "--out", (dir / "x.pia").string(),
       "--size", "8", "--pool", "400", "--k", "2", "--n", "20", "--epochs",
       "1", "--gate", "0.99", "--retrain", "0", "--task-signal", "0.001",
       "--noise", "0.5"});
  EXPECT_EQ(o.code, 3) << o.err;
  EXPECT_NE(o.err.find("shadow"), std::string::npos) << o.err;
}

TEST(CliTest, ConfigFileIsOverriddenByFlags) {
  const fs::path dir = Fresh("pia_cli_config");
  fs::create_directories(dir);
  const fs::path cfg = dir / "pia.ini";
  std::ofstream(cfg) << "preset=desk\n[describe]\nsize=64\narch=A9\n";
  Outcome o = Invoke({"--config", cfg.string(), "describe"});
  EXPECT_EQ(o.code, 0) << o.err;
  EXPECT_NE(o.out.find("5857"), std::string::npos) << o.out;
  o = Invoke({"--config", cfg.string(), "describe", "--size", "32"});
  EXPECT_EQ(o.code, 0) << o.err;
  EXPECT_EQ(o.out.find("5857"), std::string::npos) << o.out;
}

}  // namespace
}  // namespace pia::cli
