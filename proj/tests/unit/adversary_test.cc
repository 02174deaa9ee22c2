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

#include "dpsim/adversary.hh"

#include <cmath>
#include <memory>

#include <gtest/gtest.h>

#include "dpsim/engine.hh"
#include "dpsim/error.hh"
#include "dpsim/scripted.hh"
#include "dpsim/starver.hh"

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

Trace RunWith(const RunSpec& spec, Adversary& adversary) {
  StreamDraws draws(spec.seed, spec.topology->philosopher_count());
  return dpsim::Run(spec, adversary, draws);
}

std::vector<int> Schedule(const Trace& t) {
  std::vector<int> out;
  for (const StepEvent& e : t.history.events()) out.push_back(e.actor.value());
  return out;
}

int Meals(const Trace& t, PhilosopherId p, std::size_t from = 0, std::size_t to = SIZE_MAX) {
  int meals = 0;
  auto events = t.history.events();
  for (std::size_t i = from; i < std::min(to, events.size()); ++i) {
    meals += IsEatingEvent(events[i]) && events[i].actor == p;
  }
  return meals;
}

TEST(RoundRobinTest, CyclesThroughEveryone) {
  auto rr = RoundRobin();
  Trace t = RunWith(Spec(Ring(3), Algorithm::kLR1, 7), *rr);
  EXPECT_EQ(Schedule(t), (std::vector<int>{0, 1, 2, 0, 1, 2, 0}));
  EXPECT_EQ(rr->FairnessWindow(7), 3u);
  EXPECT_TRUE(FairnessCheck(t.history, 3).empty());
}

TEST(UniformRandomTest, SeedDeterminesTheSchedule) {
  RunSpec spec = Spec(Ring(4), Algorithm::kLR1, 200);
  auto a = UniformRandom(5), b = UniformRandom(5), c = UniformRandom(6);
  auto sa = Schedule(RunWith(spec, *a));
  EXPECT_EQ(sa, Schedule(RunWith(spec, *b)));
  EXPECT_NE(sa, Schedule(RunWith(spec, *c)));
}

TEST(UniformRandomTest, SchedulesBothPhilosophersEvenly) {
  auto a = UniformRandom(11);
  Trace t = RunWith(Spec(Ring(2), Algorithm::kLR1, 10000), *a);
  int zeros = 0;
  for (int p : Schedule(t)) zeros += p == 0;
  const double sigma = std::sqrt(10000 * 0.25);
  EXPECT_LE(std::abs(zeros - 5000), 3 * sigma);
}

TEST(BudgetTest, UnionBoundCoversEveryStubbornPoint) {
  for (int s : {1, 2, 3, 4, 5, 8, 9}) {
    StubbornnessBudget b = StubbornnessBudget::UnionBound(s);
    for (int k = 1; k <= 20; ++k) {
      // s independent points, each failing with probability 2^-n_k.
      EXPECT_LE(s * std::pow(2.0, -b(k)), std::pow(2.0, -k)) << "s=" << s << " k=" << k;
      EXPECT_EQ(b(k), k + static_cast<int>(std::ceil(std::log2(s))) + 1);
    }
  }
  EXPECT_EQ(StubbornnessBudget::Linear(4)(3), 7);
}

TEST(BudgetTest, RoundPairWindow) {
  std::vector<RoundRecord> rounds(3);
  rounds[0] = {0, 10, 1, true, ""};
  rounds[1] = {10, 40, 2, true, ""};
  rounds[2] = {40, 0, 3, false, ""};
  EXPECT_EQ(RoundPairWindow(rounds, 45), 40u);
  EXPECT_EQ(RoundPairWindow(rounds, 100), 90u);
}

TEST(ScriptTest, RefusesTheWrongTopology) {
  auto script = StubbornDoubledTriangle();
  RunSpec spec = Spec(Ring(3), Algorithm::kLR1, 10);
  EXPECT_THROW(RunWith(spec, *script), StrategyMismatch);
}

TEST(ScriptTest, RefusesAForeignAlgorithmUnlessFairized) {
  RunSpec spec = Spec(DoubledTriangle(), Algorithm::kGDP1, 50);
  auto bare = StubbornDoubledTriangle();
  EXPECT_THROW(RunWith(spec, *bare), StrategyMismatch);
  auto wrapped = Fairize(StubbornDoubledTriangle());
  EXPECT_NO_THROW(RunWith(spec, *wrapped));
}

// Finds a seed for which the fairized triangle script keeps everyone from
// eating over the whole horizon.
TEST(ScriptTest, TriangleBlocksEveryoneWhenDrawsCooperate) {
  int blocked = 0;
  for (std::uint64_t seed = 0; seed < 200 && blocked == 0; ++seed) {
    RunSpec spec = Spec(DoubledTriangle(), Algorithm::kLR1, 2000, seed);
    auto a = Fairize(StubbornDoubledTriangle());
    Trace t = RunWith(spec, *a);
    int meals = 0;
    for (int p = 0; p < 6; ++p) meals += Meals(t, PhilosopherId(p));
    if (meals == 0) {
      ++blocked;
      EXPECT_GE(a->inner().completed_rounds(), 20);
      EXPECT_TRUE(FairnessCheck(t.history, *a->FairnessWindow(t.size())).empty());
    }
  }
  EXPECT_EQ(blocked, 1);
}

TEST(ScriptTest, PendantEatsInEveryRoundAndTheRingNever) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    RunSpec spec = Spec(RingWithPendant(6), Algorithm::kLR1, 5000, seed);
    auto a = Fairize(StubbornPendantRing(6));
    Trace t = RunWith(spec, *a);
    const auto& rounds = a->inner().rounds();
    for (std::size_t i = 1; i < rounds.size(); ++i) {
      // A completed attempt that directly follows another one is a bare
      // round without setup.
      if (!rounds[i - 1].completed || !rounds[i].completed) continue;
      ASSERT_EQ(rounds[i].start, rounds[i - 1].end);
      EXPECT_GE(Meals(t, PhilosopherId(6), rounds[i].start, rounds[i].end), 1);
      for (int p = 0; p < 6; ++p) {
        EXPECT_EQ(Meals(t, PhilosopherId(p), rounds[i].start, rounds[i].end), 0);
      }
    }
    EXPECT_TRUE(FairnessCheck(t.history, *a->FairnessWindow(t.size())).empty()) << seed;
  }
}

TEST(ScriptTest, ThetaStaysFair) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    RunSpec spec = Spec(Theta(3, 3, 2), Algorithm::kLR2, 5000, seed);
    auto a = Fairize(StubbornTheta(3, 3, 2));
    Trace t = RunWith(spec, *a);
    EXPECT_TRUE(FairnessCheck(t.history, *a->FairnessWindow(t.size())).empty()) << seed;
  }
}

RunSpec StarverFixture(Algorithm a, std::size_t horizon) {
  RunSpec spec = Spec(Ring(3), a, horizon);
  spec.labels = std::vector<int>{3, 1, 2};
  return spec;
}

TEST(StarverTest, LocksOutP1UnderGDP1) {
  RunSpec spec = StarverFixture(Algorithm::kGDP1, 20000);
  Gdp1Starver starver(PhilosopherId(0), PhilosopherId(1), Gdp1Starver::Mode::kFixture);
  Trace t = RunWith(spec, starver);
  EXPECT_EQ(Meals(t, PhilosopherId(0)), 0);
  EXPECT_GE(Meals(t, PhilosopherId(1)), 1);
  EXPECT_EQ(starver.concessions(), 0);
  EXPECT_TRUE(FairnessCheck(t.history, *starver.FairnessWindow(t.size())).empty());
}

TEST(StarverTest, GDP2LetsP1Eat) {
  RunSpec spec = StarverFixture(Algorithm::kGDP2, 20000);
  Gdp1Starver starver(PhilosopherId(0), PhilosopherId(1), Gdp1Starver::Mode::kFixture);
  Trace t = RunWith(spec, starver);
  EXPECT_GE(Meals(t, PhilosopherId(0)), 1);
  EXPECT_TRUE(FairnessCheck(t.history, *starver.FairnessWindow(t.size())).empty());
}

TEST(StarverTest, FixtureNeedsTheLabelOrdering) {
  RunSpec spec = Spec(Ring(3), Algorithm::kGDP1, 100);
  Gdp1Starver starver(PhilosopherId(0), PhilosopherId(1), Gdp1Starver::Mode::kFixture);
  EXPECT_THROW(RunWith(spec, starver), StrategyMismatch);

  RunSpec lr1 = Spec(Ring(3), Algorithm::kLR1, 100);
  Gdp1Starver other(PhilosopherId(0), PhilosopherId(1), Gdp1Starver::Mode::kFixture);
  EXPECT_THROW(RunWith(lr1, other), StrategyMismatch);
}

TEST(StarverTest, AnalogueRunsAnywhere) {
  RunSpec spec = Spec(Ring(4), Algorithm::kLR1, 5000);
  Gdp1Starver starver(PhilosopherId(0), PhilosopherId(1), Gdp1Starver::Mode::kAnalogue);
  Trace t = RunWith(spec, starver);
  EXPECT_TRUE(FairnessCheck(t.history, *starver.FairnessWindow(t.size())).empty());
}

}  // namespace
}  // namespace dpsim
