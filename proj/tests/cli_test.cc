// Copyright 2026 The nodedp Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.h"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "nlohmann/json.hpp"

namespace nodedp::cli {
namespace {

namespace fs = std::filesystem;
using ::testing::HasSubstr;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    root_ = fs::path(::testing::TempDir()) /
            (std::string("nodedp_cli_") + info->name());
    fs::remove_all(root_);
    fs::create_directories(root_);
  }
  void TearDown() override { fs::remove_all(root_); }

  std::string WriteConfig(const std::string& name, const std::string& json) {
    const fs::path path = root_ / name;
    std::ofstream(path) << json;
    return path.string();
  }

  int Run(std::vector<std::string> args) {
    args.insert(args.begin(), "nodedp");
    std::vector<const char*> argv;
    for (const std::string& a : args) argv.push_back(a.c_str());
    out_.str("");
    err_.str("");
    return Dispatch(static_cast<int>(argv.size()), argv.data(), out_, err_);
  }

  static std::string Slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in),
                       std::istreambuf_iterator<char>());
  }

  fs::path root_;
  std::ostringstream out_;
  std::ostringstream err_;
};

constexpr char kAuditConfig[] = R"({
  "schema_version": 1, "n": 4, "K": 2, "a": 2, "b": 1, "beta": 1.0,
  "epsilon": 1.0, "C": 1.5
})";

TEST_F(CliTest, NoArgumentsPrintsUsage) {
  EXPECT_EQ(Run({}), kExitValidation);
  EXPECT_THAT(err_.str(), HasSubstr("Usage"));
}

TEST_F(CliTest, UnknownCommandIsValidationError) {
  EXPECT_EQ(Run({"frobnicate", "--config", "x", "--out", "y"}),
            kExitValidation);
  EXPECT_THAT(err_.str(), HasSubstr("Usage"));
}

TEST_F(CliTest, AuditPassingConfigWritesReport) {
  const std::string config = WriteConfig("audit.json", kAuditConfig);
  const fs::path out = root_ / "out";
  ASSERT_EQ(Run({"audit", "--config", config, "--out", out.string()}), kExitOk)
      << err_.str();
  ASSERT_TRUE(fs::exists(out / "audit.json"));
  const auto report = nlohmann::json::parse(Slurp(out / "audit.json"));
  EXPECT_TRUE(report["pass"].get<bool>());
  EXPECT_TRUE(report["restricted"]["pass"].get<bool>());

  const auto manifest = nlohmann::json::parse(Slurp(out / "manifest.json"));
  EXPECT_EQ(manifest["command"], "audit");
  EXPECT_EQ(manifest["config_sha256"].get<std::string>().size(), 64u);
  EXPECT_EQ(manifest["artifacts"][0]["name"], "audit.json");
}

TEST_F(CliTest, AuditWithInflatedCalibrationFails) {
  const std::string config = WriteConfig("audit.json", R"({
    "schema_version": 1, "n": 4, "K": 2, "a": 2, "b": 1,
    "epsilon": 1.0, "C": 1.5, "calibration_scale": 40
  })");
  EXPECT_EQ(
      Run({"audit", "--config", config, "--out", (root_ / "out").string()}),
      kExitCheckFailed);
}

TEST_F(CliTest, VerifyWithMutatedPenaltyExitsTwo) {
  const std::string config = WriteConfig("verify.json", R"({
    "schema_version": 1, "n": 6, "K": 2, "a": 5, "b": 1, "beta": 1.5,
    "lambda_override": 3, "peeling_graphs": 0
  })");
  const fs::path out = root_ / "out";
  EXPECT_EQ(Run({"verify", "--config", config, "--out", out.string(),
                 "--log-level", "off"}),
            kExitCheckFailed);
  EXPECT_TRUE(fs::exists(out / "verify.csv"));
  EXPECT_TRUE(fs::exists(out / "verify.xml"));
}

TEST_F(CliTest, VerifyAdmissiblePenaltyPasses) {
  const std::string config = WriteConfig("verify.json", R"({
    "schema_version": 1, "n": 4, "K": 2, "a": 2, "b": 1
  })");
  EXPECT_EQ(
      Run({"verify", "--config", config, "--out", (root_ / "out").string()}),
      kExitOk)
      << err_.str();
}

TEST_F(CliTest, SchemaViolationsAreValidationErrors) {
  const fs::path out = root_ / "out";
  for (const char* json : {
           R"({"n": 4, "a": 2, "b": 1, "epsilon": 1})",
           R"({"schema_version": 2, "n": 4, "a": 2, "b": 1, "epsilon": 1})",
           R"({"schema_version": 1, "n": 4, "a": 2, "b": 1, "epsilon": 1,
               "typo": 0})",
           R"({"schema_version": 1, "n": 4, "a": 1, "b": 2, "epsilon": 1})",
           R"({"schema_version": 1, "n": 4, "a": 2, "b": 1})",
           "not json",
       }) {
    const std::string config = WriteConfig("bad.json", json);
    EXPECT_EQ(Run({"audit", "--config", config, "--out", out.string()}),
              kExitValidation)
        << json;
  }
  EXPECT_EQ(Run({"audit", "--config", (root_ / "missing.json").string(),
                 "--out", out.string()}),
            kExitValidation);
}

TEST_F(CliTest, AuditAboveSizeCapIsValidationError) {
  const std::string config = WriteConfig("audit.json", R"({
    "schema_version": 1, "n": 9, "K": 2, "a": 2, "b": 1, "epsilon": 1
  })");
  EXPECT_EQ(
      Run({"audit", "--config", config, "--out", (root_ / "out").string()}),
      kExitValidation);
}

TEST_F(CliTest, SampleThenEstimate) {
  const std::string sample = WriteConfig("sample.json", R"({
    "schema_version": 1, "n": 12, "K": 2, "a": 8, "b": 1, "seed": 5
  })");
  const fs::path sample_out = root_ / "sample";
  ASSERT_EQ(Run({"sample", "--config", sample, "--out", sample_out.string()}),
            kExitOk)
      << err_.str();
  EXPECT_TRUE(fs::exists(sample_out / "graph.txt"));
  EXPECT_TRUE(fs::exists(sample_out / "truth.txt"));

  const std::string estimate = WriteConfig("estimate.json", R"({
    "schema_version": 1, "n": 12, "K": 2, "a": 8, "b": 1,
    "epsilon": 50, "graph_file": "sample/graph.txt", "seed": 9
  })");
  const fs::path est_out = root_ / "estimate";
  ASSERT_EQ(Run({"estimate", "--config", estimate, "--out", est_out.string()}),
            kExitOk)
      << err_.str();
  const auto record = nlohmann::json::parse(Slurp(est_out / "estimate.json"));
  EXPECT_EQ(record["labeling"].size(), 12u);
  EXPECT_EQ(record["seed"], 9);
}

TEST_F(CliTest, SeedFlagOverridesConfig) {
  const std::string sample = WriteConfig("sample.json", R"({
    "schema_version": 1, "n": 12, "K": 2, "a": 8, "b": 1, "seed": 5
  })");
  ASSERT_EQ(Run({"sample", "--config", sample, "--out", (root_ / "a").string(),
                 "--seed", "6"}),
            kExitOk);
  ASSERT_EQ(
      Run({"sample", "--config", sample, "--out", (root_ / "b").string()}),
      kExitOk);
  const auto manifest = nlohmann::json::parse(Slurp(root_ / "a/manifest.json"));
  EXPECT_EQ(manifest["seed"], 6);
  EXPECT_NE(Slurp(root_ / "a/graph.txt"), Slurp(root_ / "b/graph.txt"));
}

TEST_F(CliTest, LowerBoundExactHoldsTheFloor) {
  const std::string config = WriteConfig("lb.json", R"({
    "schema_version": 1, "n": 4, "K": 2, "a": 2, "b": 1, "C": 1.5,
    "epsilon": [0.5, 4], "mode": "exact"
  })");
  const fs::path out = root_ / "out";
  ASSERT_EQ(Run({"lower-bound", "--config", config, "--out", out.string()}),
            kExitOk)
      << err_.str();
  const auto report = nlohmann::json::parse(Slurp(out / "lower_bound.json"));
  EXPECT_EQ(report["results"].size(), 2u);
  EXPECT_TRUE(report["pass"].get<bool>());
}

TEST_F(CliTest, SweepRerunIsByteIdentical) {
  const std::string config = WriteConfig("sweep.json", R"({
    "schema_version": 1, "n": [8], "a": [6], "b": [1],
    "epsilon": [1, 100], "replicates": 50, "seed": 4
  })");
  const fs::path first = root_ / "first";
  const fs::path second = root_ / "second";
  ASSERT_EQ(Run({"sweep", "--config", config, "--out", first.string()}),
            kExitOk)
      << err_.str();
  ASSERT_EQ(Run({"sweep", "--config", config, "--out", second.string(),
                 "--threads", "2"}),
            kExitOk);
  for (const char* name :
       {"risk.csv", "risk.json", "overlay.csv", "trends.json"}) {
    EXPECT_FALSE(Slurp(first / name).empty()) << name;
    EXPECT_EQ(Slurp(first / name), Slurp(second / name)) << name;
  }
}

TEST_F(CliTest, WritesOnlyInsideOutputDirectory) {
  const std::string config = WriteConfig("audit.json", kAuditConfig);
  const fs::path out = root_ / "nested" / "out";
  ASSERT_EQ(Run({"audit", "--config", config, "--out", out.string()}), kExitOk);
  std::vector<std::string> top;
  for (const auto& entry : fs::directory_iterator(root_)) {
    top.push_back(entry.path().filename().string());
  }
  EXPECT_THAT(top, ::testing::UnorderedElementsAre("audit.json", "nested"));
  std::vector<std::string> inside;
  for (const auto& entry : fs::directory_iterator(out)) {
    inside.push_back(entry.path().filename().string());
  }
  EXPECT_THAT(inside,
              ::testing::UnorderedElementsAre("audit.json", "manifest.json"));
}

TEST_F(CliTest, BinaryExitCodes) {
  const std::string binary = NODEDP_CLI_BINARY;
  EXPECT_EQ(WEXITSTATUS(std::system((binary + " > /dev/null 2>&1").c_str())),
            kExitValidation);
  const std::string config = WriteConfig("audit.json", kAuditConfig);
  const std::string command = binary + " audit --config " + config + " --out " +
                              (root_ / "out").string() + " > /dev/null 2>&1";
  EXPECT_EQ(WEXITSTATUS(std::system(command.c_str())), kExitOk);
  EXPECT_TRUE(fs::exists(root_ / "out" / "manifest.json"));
}

}  // namespace
}  // namespace nodedp::cli
