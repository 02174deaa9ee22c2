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

#include "dpsim/protocol.hh"

#include <memory>

#include <gtest/gtest.h>

#include "dpsim/error.hh"

namespace dpsim {
namespace {

const PhilosopherId P0(0), P1(1), P2(2);

Configuration Init(Topology t, Algorithm a, int m = 0) {
  auto shared = std::make_shared<const Topology>(std::move(t));
  if (m == 0) m = shared->fork_count();
  return InitConfiguration(shared, a, m);
}

// Puts p at `line` holding the forks on the given sides.
void Place(Configuration& c, PhilosopherId p, int line, std::optional<Side> committed,
           std::initializer_list<Side> held = {}) {
  PhilosopherState& s = c.philosophers[p.index()];
  s.line = line;
  s.hungry = true;
  s.committed = committed;
  for (Side side : held) {
    c.forks[c.topo().fork(p, side).index()].holder = p;
    (side == Side::kLeft ? s.holds_left : s.holds_right) = true;
  }
}

TEST(ProtocolTest, LayoutLines) {
  EXPECT_EQ(Layout(Algorithm::kLR1).release, 6);
  EXPECT_EQ(Layout(Algorithm::kLR2).sign, 8);
  EXPECT_EQ(Layout(Algorithm::kGDP1).relabel, 4);
  EXPECT_EQ(Layout(Algorithm::kGDP2).release, 10);
  EXPECT_EQ(Layout(Algorithm::kLR1).insert, 0);
}

TEST(ProtocolTest, InitialConfiguration) {
  Configuration c = Init(Ring(6), Algorithm::kLR1);
  EXPECT_EQ(c.n(), 6);
  for (int f = 0; f < 6; ++f) EXPECT_TRUE(c.IsFree(ForkId(f)));
  for (const auto& s : c.philosophers) EXPECT_EQ(s.line, Layout(Algorithm::kLR1).think);

  Configuration gdp2 = Init(DoubledTriangle(), Algorithm::kGDP2, 3);
  for (const auto& f : gdp2.forks) EXPECT_EQ(f.label, 0);
  EXPECT_NO_THROW(CheckInvariants(gdp2));
}

TEST(ProtocolTest, LabelBoundMustCoverTheForks) {
  EXPECT_THROW(Init(Ring(3), Algorithm::kGDP1, 2), ConfigurationError);
  EXPECT_NO_THROW(Init(Ring(3), Algorithm::kGDP1, 3));
}

TEST(ProtocolTest, LR1TakesAFreeCommittedFork) {
  Configuration c = Init(Ring(3), Algorithm::kLR1);
  Place(c, P0, 3, Side::kLeft);
  FixedDraws none(std::nullopt);
  StepEvent e = StepInPlace(c, P0, none);
  EXPECT_EQ(e.action, Action::kTestAndTakeFirst);
  EXPECT_TRUE(e.success);
  EXPECT_EQ(c.fork(ForkId(0)).holder, P0);
  EXPECT_EQ(c.phil(P0).line, 4);
}

TEST(ProtocolTest, LR1SpinsOnABusyFork) {
  Configuration c = Init(Ring(3), Algorithm::kLR1);
  Place(c, P2, 4, Side::kLeft, {Side::kLeft});  // P2 holds fork 2
  Place(c, P1, 3, Side::kRight);                // P1 wants fork 2
  FixedDraws none(std::nullopt);
  EXPECT_TRUE(Enabled(c, P1));
  StepEvent e = StepInPlace(c, P1, none);
  EXPECT_EQ(e.action, Action::kTestAndTakeFirst);
  EXPECT_FALSE(e.success);
  EXPECT_EQ(c.phil(P1).line, 3);
}

TEST(ProtocolTest, LR1ReleasesWhenTheSecondForkIsTaken) {
  Configuration c = Init(Ring(3), Algorithm::kLR1);
  Place(c, P0, 4, Side::kLeft, {Side::kLeft});   // P0 holds fork 0
  Place(c, P1, 4, Side::kLeft, {Side::kLeft});   // P1 holds fork 1
  FixedDraws none(std::nullopt);
  StepEvent e = StepInPlace(c, P0, none);
  EXPECT_EQ(e.action, Action::kReleaseFirst);
  EXPECT_TRUE(c.IsFree(ForkId(0)));
  EXPECT_EQ(c.phil(P0).line, 2);
  EXPECT_FALSE(c.phil(P0).committed.has_value());
  EXPECT_NO_THROW(CheckInvariants(c));
}

TEST(ProtocolTest, GDP1RelabelsOnEqualLabels) {
  Configuration c = Init(Ring(3), Algorithm::kGDP1, 6);
  Place(c, P0, 4, Side::kLeft, {Side::kLeft});
  FixedDraws five(5);
  StepEvent e = StepInPlace(c, P0, five);
  EXPECT_EQ(e.action, Action::kRelabel);
  EXPECT_EQ(c.fork(ForkId(0)).label, 5);
  EXPECT_EQ(e.old_label, 0);
  EXPECT_EQ(e.new_label, 5);
  EXPECT_EQ(c.phil(P0).line, 5);
}

TEST(ProtocolTest, GDP1KeepsDistinctLabels) {
  Configuration c = Init(Ring(3), Algorithm::kGDP1, 6);
  c.forks[0].label = 2;
  c.forks[1].label = 4;
  Place(c, P0, 4, Side::kLeft, {Side::kLeft});
  FixedDraws none(std::nullopt);
  EXPECT_EQ(StepInPlace(c, P0, none).action, Action::kKeepLabel);
  EXPECT_EQ(c.fork(ForkId(0)).label, 2);
}

TEST(ProtocolTest, GDP1CommitsToTheHigherLabel) {
  FixedDraws none(std::nullopt);
  Configuration c = Init(Ring(3), Algorithm::kGDP1);
  c.forks[0].label = 3;
  c.forks[1].label = 1;
  Place(c, P0, 2, std::nullopt);
  EXPECT_EQ(StepInPlace(c, P0, none).action, Action::kCommitPriority);
  EXPECT_EQ(c.phil(P0).committed, Side::kLeft);

  Configuration tie = Init(Ring(3), Algorithm::kGDP1);
  Place(tie, P0, 2, std::nullopt);
  StepInPlace(tie, P0, none);
  EXPECT_EQ(tie.phil(P0).committed, Side::kRight);
}

TEST(ProtocolTest, Cond) {
  // Fork 1 of ring(3) is shared by P0 (its right) and P1 (its left).
  Configuration c = Init(Ring(3), Algorithm::kLR2);
  const Topology& t = c.topo();
  ForkState& f = c.forks[1];
  const int p0 = t.slot(P0, Side::kRight), p1 = t.slot(P1, Side::kLeft);
  f.requested[p0] = 1;
  EXPECT_TRUE(Cond(c, ForkId(1), P0));

  f.requested[p1] = 1;
  EXPECT_TRUE(Cond(c, ForkId(1), P0));  // nobody has eaten yet
  EXPECT_TRUE(Cond(c, ForkId(1), P1));

  f.use_clock = 5;
  f.last_use[p0] = 5;
  f.last_use[p1] = 3;
  EXPECT_FALSE(Cond(c, ForkId(1), P0));
  EXPECT_TRUE(Cond(c, ForkId(1), P1));
}

TEST(ProtocolTest, CondBlocksTheMoreRecentEater) {
  Configuration c = Init(Ring(3), Algorithm::kLR2);
  ForkState& f = c.forks[1];
  f.requested[c.topo().slot(P1, Side::kLeft)] = 1;
  f.use_clock = 1;
  f.last_use[c.topo().slot(P0, Side::kRight)] = 1;
  Place(c, P0, Layout(Algorithm::kLR2).take_first, Side::kRight);
  FixedDraws none(std::nullopt);
  EXPECT_EQ(StepInPlace(c, P0, none).action, Action::kCondFail);
  EXPECT_TRUE(c.IsFree(ForkId(1)));
}

TEST(ProtocolTest, EatingEvents) {
  StepEvent e;
  e.action = Action::kFinishEat;
  EXPECT_TRUE(IsEatingEvent(e));
  e.action = Action::kEatTick;
  EXPECT_FALSE(IsEatingEvent(e));
  e.action = Action::kTestAndTakeSecond;
  e.success = true;
  EXPECT_FALSE(IsEatingEvent(e));
}

TEST(ProtocolTest, EatingLastsTheConfiguredSteps) {
  auto t = std::make_shared<const Topology>(Ring(2));
  ProtocolOptions options;
  options.eat_steps = 3;
  Configuration c = InitConfiguration(t, Algorithm::kLR1, 2, {}, options);
  Place(c, P0, 4, Side::kLeft, {Side::kLeft});
  FixedDraws none(std::nullopt);
  EXPECT_TRUE(StepInPlace(c, P0, none).success);
  EXPECT_EQ(StepInPlace(c, P0, none).action, Action::kEatTick);
  EXPECT_EQ(StepInPlace(c, P0, none).action, Action::kEatTick);
  EXPECT_EQ(StepInPlace(c, P0, none).action, Action::kFinishEat);
}

TEST(ProtocolTest, HungerSchedule) {
  auto t = std::make_shared<const Topology>(Ring(2));
  HungerModel hunger{{{2}, {}}};
  Configuration c = InitConfiguration(t, Algorithm::kLR1, 2, hunger);
  FixedDraws none(std::nullopt);
  EXPECT_EQ(StepInPlace(c, P0, none).action, Action::kThink);
  EXPECT_EQ(StepInPlace(c, P0, none).action, Action::kThink);
  EXPECT_EQ(StepInPlace(c, P0, none).action, Action::kGetHungry);
  for (int i = 0; i < 5; ++i) EXPECT_EQ(StepInPlace(c, P1, none).action, Action::kThink);
}

// Random walks through every algorithm: every philosopher stays enabled,
// invariants hold after each step, and replaying the events reproduces the
// walk.
class WalkTest : public ::testing::TestWithParam<Algorithm> {};

TEST_P(WalkTest, RandomWalkKeepsInvariants) {
  for (Topology t : {Ring(3), DoubledTriangle(), Theta(2, 2, 2), RingWithPendant(4)}) {
    Configuration c = Init(t, GetParam());
    Configuration replay = c;
    StreamDraws draws(17, c.n());
    RandomStream scheduler(99);
    for (int i = 0; i < 5000; ++i) {
      PhilosopherId p(static_cast<int>(scheduler.UniformInt(0, c.n() - 1)));
      for (int q = 0; q < c.n(); ++q) ASSERT_TRUE(Enabled(c, PhilosopherId(q)));
      Configuration before = c;
      StepEvent e = StepInPlace(c, p, draws);
      ASSERT_NO_THROW(CheckInvariants(c)) << t.name() << " step " << i;
      ASSERT_NO_THROW(CheckTransition(before, c, e)) << t.name() << " step " << i;
      ReplayEvent(replay, e);
    }
    EXPECT_TRUE(replay == c);
  }
}

INSTANTIATE_TEST_SUITE_P(AllAlgorithms, WalkTest,
                         ::testing::Values(Algorithm::kLR1, Algorithm::kLR2, Algorithm::kGDP1,
                                           Algorithm::kGDP2),
                         [](const auto& info) { return std::string(ToString(info.param)); });

TEST(ProtocolTest, InvariantCheckCatchesDoubleHolding) {
  Configuration c = Init(Ring(3), Algorithm::kLR1);
  Place(c, P0, 4, Side::kLeft, {Side::kLeft});
  c.philosophers[2].holds_right = true;  // P2 also claims fork 0
  EXPECT_THROW(CheckInvariants(c), InvariantViolation);
}

TEST(ProtocolTest, ParseAlgorithm) {
  EXPECT_EQ(ParseAlgorithm("GDP2"), Algorithm::kGDP2);
  EXPECT_STREQ(ToString(Algorithm::kLR2), "LR2");
  EXPECT_THROW(ParseAlgorithm("LR3"), ConfigurationError);
}

}  // namespace
}  // namespace dpsim
