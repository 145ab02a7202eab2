/* Copyright 2026 The Rehab Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "support/fixtures.hpp"

namespace {

using nlohmann::json;
using rehab::testing::data_path;

struct Result {
  int code = -1;
  std::string out;
};

Result rehab_cli(const std::string& args) {
  const std::string cmd = std::string(REHAB_CLI_PATH) + " " + args + " 2>/dev/null";
  Result r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST(Cli, ValidateIdenticalContent) {
  const auto r = rehab_cli("validate --prescription " + data_path("worksheets/goal01.json") + " --program " + data_path("goal01.dsl"));
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_TRUE(json::parse(r.out).at("ok").get<bool>());
}

TEST(Cli, ValidateMismatchListsFailures) {
  const auto r = rehab_cli("validate --prescription " + data_path("worksheets/goal02.json") + " --program " + data_path("goal01.dsl"));
  EXPECT_EQ(r.code, 1);
  const auto j = json::parse(r.out);
  EXPECT_FALSE(j.at("ok").get<bool>());
  ASSERT_FALSE(j.at("failures").empty());
  EXPECT_TRUE(j.at("failures")[0].contains("kind"));
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(rehab_cli("validate --no-such-flag").code, 2);
  EXPECT_EQ(rehab_cli("bench --seed 7 --bogus").code, 2);
  EXPECT_EQ(rehab_cli("").code, 2);
  EXPECT_EQ(rehab_cli("frobnicate").code, 2);
  EXPECT_EQ(rehab_cli("--help").code, 0);
}

TEST(Cli, GenerateRunThenValidate) {
  const auto dir = rehab::testing::scratch_dir("cli-generate");
  const auto prog = (dir / "goal04.dsl").string();
  EXPECT_EQ(rehab_cli("generate --prescription " + data_path("worksheets/goal04.json") + " --out " + prog).code, 0);
  EXPECT_EQ(rehab_cli("validate --prescription " + data_path("worksheets/goal04.json") + " --program " + prog).code, 0);
  const auto gold = (dir / "goal01.json").string();
  EXPECT_EQ(rehab_cli("run --program " + data_path("goal01.dsl") + " --scenario " +
                      data_path("scenarios/goal01_zero_noise.json") + " --out " + gold).code, 0);
  const auto run = json::parse(slurp(gold));
  EXPECT_EQ(run.at("log").at("steps").size(), 11u);
  for (const auto& v : run.at("pacing")) EXPECT_EQ(v, "Adequate");
}

TEST(Cli, RetrofitCorpus) {
  const auto r = rehab_cli("retrofit --corpus " + data_path("corpus") + " --templates " + data_path("templates"));
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("Translatable under template: 22/40"), std::string::npos);
}

TEST(Cli, BenchWritesReport) {
  const auto dir = rehab::testing::scratch_dir("cli-bench");
  const auto r = rehab_cli("bench --seed 7 --out " + dir.string() + " --data-dir " + rehab::testing::data_dir());
  EXPECT_EQ(r.code, 0) << r.out;
  const auto monitoring = slurp(dir / "monitoring.txt");
  EXPECT_NE(monitoring.find("accuracy"), std::string::npos);
  EXPECT_NE(monitoring.find("sensitivity"), std::string::npos);
  EXPECT_NE(monitoring.find("specificity"), std::string::npos);
  const auto category_table = slurp(dir / "categories.txt");
  for (const char* row : {"Procedural Variation                  15", "New Equipment Use                      6",
                          "Contingency                            6", "Compensatory Strategy Options          4",
                          "Motor Priming                          3"}) {
    EXPECT_NE(category_table.find(row), std::string::npos) << row;
  }
  const auto summary = json::parse(slurp(dir / "summary.json"));
  EXPECT_TRUE(summary.is_object());
}

}  // namespace
