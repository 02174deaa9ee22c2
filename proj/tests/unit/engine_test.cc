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

#include "dpsim/engine.hh"

#include <memory>
#include <sstream>

#include <gtest/gtest.h>

#include "dpsim/error.hh"

namespace dpsim {
namespace {

RunSpec Spec(Topology t, Algorithm a, std::size_t horizon, std::uint64_t seed = 1) {
  RunSpec spec;
  spec.topology = std::make_shared<const Topology>(std::move(t));
  spec.algorithm = a;
  spec.horizon = horizon;
  spec.seed = seed;
  return spec;
}

// Schedules the same philosopher forever.
class Only : public Adversary {
 public:
  explicit Only(int p) : p_(p) {}
  PhilosopherId Next(const History&) override { return p_; }
  std::string name() const override { return "only"; }

 private:
  PhilosopherId p_;
};

std::string Tsv(const Trace& t) {
  std::ostringstream out;
  WriteTraceTsv(t.history, out);
  return out.str();
}

TEST(EngineTest, RingOfTwoMakesProgress) {
  Trace t = dpsim::Run(Spec(Ring(2), Algorithm::kLR1, 1000));
  int meals = 0;
  for (const StepEvent& e : t.history.events()) meals += IsEatingEvent(e);
  EXPECT_GE(meals, 1);
  EXPECT_EQ(t.size(), 1000u);
  EXPECT_EQ(t.adversary_name, "round-robin");
}

TEST(EngineTest, RunsAreReproducible) {
  RunSpec spec = Spec(Theta(2, 2, 2), Algorithm::kGDP2, 3000, 42);
  spec.adversary.kind = "uniform-random";
  EXPECT_EQ(Tsv(dpsim::Run(spec)), Tsv(dpsim::Run(spec)));
  RunSpec other = spec;
  other.seed = 43;
  EXPECT_NE(Tsv(dpsim::Run(spec)), Tsv(dpsim::Run(other)));
}

TEST(EngineTest, CheckedRunsAgreeWithUncheckedOnes) {
  RunSpec spec = Spec(DoubledTriangle(), Algorithm::kLR2, 3000, 9);
  spec.adversary.kind = "uniform-random";
  RunOptions checked;
  checked.checked = true;
  EXPECT_EQ(Tsv(dpsim::Run(spec)), Tsv(dpsim::Run(spec, checked)));
}

TEST(EngineTest, SnapshotsReplayTheHistory) {
  RunSpec spec = Spec(Ring(4), Algorithm::kGDP1, 500, 3);
  spec.adversary.kind = "uniform-random";
  Trace t = dpsim::Run(spec);
  EXPECT_TRUE(t.history.SnapshotAt(t.size()) == t.final());
  EXPECT_TRUE(t.history.SnapshotAt(0) == t.history.initial());
}

TEST(EngineTest, StopEndsTheRunEarly) {
  RunOptions options;
  options.stop = [](const History& h, const Adversary&) {
    return IsEatingEvent(h.events().back());
  };
  Trace t = dpsim::Run(Spec(Ring(3), Algorithm::kLR1, 10000), options);
  EXPECT_TRUE(t.stopped_early);
  EXPECT_TRUE(IsEatingEvent(t.history.events().back()));
}

TEST(EngineTest, TraceTsvFormat) {
  Trace t = dpsim::Run(Spec(Ring(2), Algorithm::kLR1, 2));
  EXPECT_EQ(Tsv(t).substr(0, Tsv(t).find('\n')), "0\t0\tgetHungry\t-\t-");
  std::istringstream lines(Tsv(t));
  std::string line;
  int count = 0;
  while (std::getline(lines, line)) ++count;
  EXPECT_EQ(count, 2);
}

TEST(EngineTest, ValidateRejectsBadSpecs) {
  RunSpec gdp = Spec(Ring(3), Algorithm::kGDP1, 10);
  gdp.m = 2;
  EXPECT_THROW(
      {
        Validate(gdp);
        InitialConfiguration(gdp);
      },
      ConfigurationError);
  RunSpec labels = Spec(Ring(3), Algorithm::kGDP1, 10);
  labels.labels = std::vector<int>{1, 2};
  EXPECT_THROW(Validate(labels), ConfigurationError);
  labels.labels = std::vector<int>{1, 2, 4};
  EXPECT_THROW(Validate(labels), ConfigurationError);
  labels.labels = std::vector<int>{1, 2, 3};
  EXPECT_NO_THROW(Validate(labels));
  EXPECT_EQ(InitialConfiguration(labels).fork(ForkId(2)).label, 3);
}

TEST(EngineTest, UnknownAdversaryListsTheChoices) {
  RunSpec spec = Spec(Ring(3), Algorithm::kLR1, 10);
  spec.adversary.kind = "sneaky";
  try {
    MakeAdversary(spec);
    FAIL() << "expected a ConfigurationError";
  } catch (const ConfigurationError& e) {
    EXPECT_NE(std::string(e.what()).find("round-robin"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("gdp1-starver"), std::string::npos);
  }
}

TEST(EngineTest, TrialSeedsAreDerived) {
  RunSpec spec = Spec(Ring(3), Algorithm::kLR1, 10, 7);
  EXPECT_EQ(TrialSpec(spec, 2).seed, DeriveSeed(7, kTrialStream + 2));
  EXPECT_NE(TrialSpec(spec, 2).seed, TrialSpec(spec, 3).seed);
}

TEST(FairnessTest, RoundRobinIsFairAtWindowN) {
  Trace t = dpsim::Run(Spec(Ring(5), Algorithm::kLR1, 1000));
  EXPECT_TRUE(FairnessCheck(t.history, 5).empty());
  EXPECT_FALSE(FairnessCheck(t.history, 4).empty());
}

TEST(FairnessTest, StarvedPhilosopherIsReported) {
  RunSpec spec = Spec(Ring(2), Algorithm::kLR1, 30);
  Only zero(0);
  StreamDraws draws(1, 2);
  Trace t = dpsim::Run(spec, zero, draws);
  auto v = FairnessCheck(t.history, 10);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].philosopher, PhilosopherId(1));
  EXPECT_EQ(v[0].from, 0u);
  EXPECT_EQ(v[0].to, 30u);
  EXPECT_THROW(FairnessCheck(t.history, 0), ConfigurationError);
}

TEST(MetricsTest, FirstMealAtStepSeventeen) {
  // P0 and P1 think for 100 steps; P0's thinking fills steps 0..12, then P2
  // walks hungry -> commit -> take -> take -> finishEat in steps 13..17.
  RunSpec spec = Spec(Ring(3), Algorithm::kLR1, 18);
  spec.hunger.think_durations = {{100}, {100}, {0}};
  struct Script : Adversary {
    PhilosopherId Next(const History& h) override {
      return PhilosopherId(h.size() < 13 ? 0 : 2);
    }
    std::string name() const override { return "script"; }
  } script;
  StreamDraws draws(1, 3);
  Trace t = dpsim::Run(spec, script, draws);
  RunMetrics m = Metrics(t);
  EXPECT_EQ(m.philosophers[2].eat_count, 1);
  EXPECT_EQ(m.philosophers[2].first_eat_step, 17u);
  EXPECT_EQ(m.philosophers[2].max_hunger, 3u);
  EXPECT_EQ(m.philosophers[0].eat_count, 0);
  EXPECT_FALSE(m.philosophers[0].first_eat_step.has_value());

  std::ostringstream csv;
  WriteMetricsCsv(m, csv);
  EXPECT_EQ(csv.str(),
            "philosopher,eat_count,first_eat_step,max_hunger\n0,0,,0\n1,0,,0\n2,1,17,3\n");
}

TEST(MetricsTest, NoMeals) {
  RunSpec spec = Spec(Ring(3), Algorithm::kLR1, 50);
  spec.hunger.think_durations = {{}, {}, {}};
  RunMetrics m = Metrics(dpsim::Run(spec));
  for (const auto& p : m.philosophers) EXPECT_EQ(p.eat_count, 0);
}

TEST(MetricsTest, StarverFixture) {
  RunSpec spec = Spec(Ring(3), Algorithm::kGDP1, 5000);
  spec.labels = std::vector<int>{3, 1, 2};
  spec.adversary.kind = "gdp1-starver";
  spec.adversary.params = {0, 1};
  Trace t = dpsim::Run(spec);
  RunMetrics m = Metrics(t);
  EXPECT_EQ(m.philosophers[0].eat_count, 0);
  EXPECT_GE(m.philosophers[1].eat_count, 1);
  EXPECT_TRUE(t.stated_window.has_value());
  EXPECT_TRUE(m.fairness_violations.empty());
}

}  // namespace
}  // namespace dpsim
