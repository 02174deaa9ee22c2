/*
 * Copyright (c) 2026, The dpsim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
*/

#include "dpsim/config.hh"

#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "dpsim/dispatch.hh"
#include "dpsim/error.hh"

namespace dpsim {
namespace {

namespace fs = std::filesystem;

int ErrorLine(const std::string& text) {
  try {
    ParseConfig(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

std::string Slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

fs::path Scratch(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / "dpsim-config-test" / name;
  fs::remove_all(dir);
  return dir;
}

TEST(ConfigTest, MinimalRunUsesDefaults) {
  ExperimentConfig cfg = ParseConfig("command = run\ntopology = ring 3\nalgorithm = LR1\n");
  EXPECT_EQ(cfg.command, "run");
  EXPECT_EQ(cfg.spec.topology->name(), "ring(3)");
  EXPECT_EQ(cfg.spec.adversary.kind, "round-robin");
  EXPECT_EQ(cfg.spec.horizon, 10000u);
  EXPECT_EQ(cfg.spec.seed, 0u);
  EXPECT_EQ(cfg.spec.draw_bias, Rational(1, 2));
  EXPECT_EQ(cfg.trials, 100u);
  EXPECT_EQ(cfg.out, ".");
}

TEST(ConfigTest, FullEstimateConfig) {
  ExperimentConfig cfg = ParseConfig(
      "# comment\n"
      "command = estimate\n"
      "topology = theta 3 3 2\n"
      "algorithm = LR2\n"
      "adversary = fairize stubborn-theta\n"
      "budget = linear 3\n"
      "statistic = no-eat\n"
      "rounds = 12\n"
      "trials = 50\n"
      "seed = 9\n"
      "unless = T => E\n"
      "unless = T[0] => E[0]\n");
  EXPECT_TRUE(cfg.spec.adversary.fairize);
  EXPECT_EQ(cfg.spec.adversary.kind, "stubborn-theta");
  EXPECT_EQ(cfg.spec.adversary.budget_extra, 3);
  EXPECT_EQ(cfg.rounds, 12);
  EXPECT_EQ(cfg.unless.size(), 2u);
  EXPECT_EQ(cfg.unless[1].first, "T[0]");
}

TEST(ConfigTest, HungerSchedule) {
  ExperimentConfig cfg = ParseConfig(
      "command = run\ntopology = ring 3\nalgorithm = LR1\nhunger = 1,2; 0; 3\n");
  EXPECT_EQ(cfg.spec.hunger.think_durations,
            (std::vector<std::vector<int>>{{1, 2}, {0}, {3}}));
  EXPECT_TRUE(ParseConfig("command = run\ntopology = ring 3\nalgorithm = LR1\nhunger = always\n")
                  .spec.hunger.always_hungry());
  EXPECT_EQ(ErrorLine("command = run\ntopology = ring 3\nhunger = 1; 2\nalgorithm = LR1\n"), 3);
}

TEST(ConfigTest, LabelBoundBelowForkCount) {
  const std::string text = "command = run\ntopology = ring 3\nalgorithm = GDP1\nm = 2\n";
  EXPECT_EQ(ErrorLine(text), 4);
  EXPECT_NO_THROW(ParseConfig("command = run\ntopology = ring 3\nalgorithm = GDP1\nm = 3\n"));
}

TEST(ConfigTest, UnknownAdversaryListsTheChoices) {
  try {
    ParseConfig("command = run\ntopology = ring 3\nalgorithm = LR1\nadversary = sneaky\n");
    FAIL() << "expected a ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 4);
    EXPECT_NE(std::string(e.what()).find("uniform-random"), std::string::npos);
  }
}

TEST(ConfigTest, Mistakes) {
  EXPECT_EQ(ErrorLine("command = run\ncolour = blue\n"), 2);
  EXPECT_EQ(ErrorLine("command = run\ncommand = run\n"), 2);
  EXPECT_EQ(ErrorLine("command = run\ntopology = ring 3\nalgorithm = LR1\ntrials = many\n"), 4);
  EXPECT_EQ(ErrorLine("command = run\ntopology = hexagon\n"), 2);
  EXPECT_EQ(ErrorLine("command = run\nno equals sign\n"), 2);
  EXPECT_GT(ErrorLine("topology = ring 3\nalgorithm = LR1\n"), 0);
  EXPECT_GT(ErrorLine("command = run\ntopology = ring 3\n"), 0);
  // Script on a topology it does not fit.
  EXPECT_EQ(ErrorLine("command = run\ntopology = ring 3\nalgorithm = LR1\n"
                      "adversary = stubborn-triangle\n"),
            4);
}

TEST(DispatchTest, OracleDistinct) {
  std::ostringstream out;
  EXPECT_EQ(Dispatch(ParseConfig("command = oracle\noracle = distinct 3 3\n"), out), kExitOk);
  EXPECT_EQ(out.str(), "2/9\n");
}

TEST(DispatchTest, VerifyTriangle) {
  ExperimentConfig cfg = ParseConfig(
      "command = verify\ntopology = doubled-triangle\nalgorithm = LR1\n"
      "adversary = stubborn-triangle\n");
  cfg.out = Scratch("verify").string();
  std::ostringstream out;
  EXPECT_EQ(Dispatch(cfg, out), kExitOk);
  auto j = nlohmann::json::parse(Slurp(fs::path(cfg.out) / "verify.json"));
  EXPECT_TRUE(j["verification"]["passed"].get<bool>());
  EXPECT_EQ(j["verification"]["setup_probability"], "1/4");
}

TEST(DispatchTest, RunIsByteIdentical) {
  const std::string text =
      "command = run\ntopology = theta 2 2 2\nalgorithm = GDP2\nadversary = uniform-random\n"
      "horizon = 2000\nseed = 12\nunless = T[*] => E[*]\n";
  ExperimentConfig a = ParseConfig(text), b = ParseConfig(text);
  a.out = Scratch("run-a").string();
  b.out = Scratch("run-b").string();
  std::ostringstream sink;
  Dispatch(a, sink);
  Dispatch(b, sink);
  for (const char* f : {"trace.tsv", "metrics.csv", "report.json"}) {
    EXPECT_FALSE(Slurp(fs::path(a.out) / f).empty()) << f;
    EXPECT_EQ(Slurp(fs::path(a.out) / f), Slurp(fs::path(b.out) / f)) << f;
  }
  auto j = nlohmann::json::parse(Slurp(fs::path(a.out) / "report.json"));
  EXPECT_EQ(j["unless"].size(), 6u);
}

TEST(DispatchTest, EstimateWritesCsvAndJson) {
  ExperimentConfig cfg = ParseConfig(
      "command = estimate\ntopology = ring 4\nalgorithm = GDP1\nstatistic = eat-all\n"
      "trials = 20\nhorizon = 2000\n");
  cfg.out = Scratch("estimate").string();
  std::ostringstream out;
  EXPECT_EQ(Dispatch(cfg, out), kExitOk);
  std::string csv = Slurp(fs::path(cfg.out) / "estimate.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "statistic,trials,successes,estimate,ci_low,ci_high");
  auto j = nlohmann::json::parse(Slurp(fs::path(cfg.out) / "estimate.json"));
  EXPECT_EQ(j["successes"], 20);
}

TEST(DispatchTest, ExitCodes) {
  EXPECT_EQ(ExitCodeFor(ParseError(3, "x")), kExitConfigError);
  EXPECT_EQ(ExitCodeFor(StrategyMismatch("x")), kExitConfigError);
  EXPECT_EQ(ExitCodeFor(DomainError("x")), kExitConfigError);
  EXPECT_EQ(ExitCodeFor(CapExceeded("x")), kExitAborted);
  EXPECT_EQ(ExitCodeFor(ExperimentAborted("x")), kExitAborted);
  EXPECT_EQ(ExitCodeFor(InvariantViolation("x")), kExitInternalError);
}

}  // namespace
}  // namespace dpsim
