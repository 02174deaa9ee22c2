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

#include <memory>
#include <stdexcept>

#include <gtest/gtest.h>

#include "dpsim/analysis/estimate.hh"
#include "dpsim/analysis/explore.hh"
#include "dpsim/analysis/isomorphism.hh"
#include "dpsim/analysis/oracles.hh"
#include "dpsim/analysis/predicates.hh"
#include "dpsim/analysis/verify.hh"
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

TEST(OracleTest, DistinctValues) {
  EXPECT_EQ(DistinctValueProbability(2, 2), Rational(1, 2));
  EXPECT_EQ(DistinctValueProbability(3, 3), Rational(2, 9));
  EXPECT_EQ(DistinctValueProbability(5, 1), Rational(1));
  EXPECT_EQ(DistinctValueEnumerate(3, 3), Rational(6, 27));
  EXPECT_EQ(DistinctValueEnumerate(4, 2), Rational(12, 16));
  EXPECT_EQ(DistinctValueEnumerate(2, 3), Rational(0));
  EXPECT_THROW(DistinctValueEnumerate(10, 10), CapExceeded);
  EXPECT_THROW(DistinctValueProbability(3, 4), DomainError);
}

TEST(OracleTest, ProductBound) {
  ProductBound one = ProductLowerBound(Rational(1, 2), 1);
  EXPECT_EQ(one.product, Rational(1, 2));
  EXPECT_EQ(one.bound, Rational(1, 2));
  ProductBound three = ProductLowerBound(Rational(1, 2), 3);
  EXPECT_EQ(three.product, Rational(21, 64));
  EXPECT_EQ(three.bound, Rational(5, 16));
  EXPECT_EQ(three.limit, Rational(1, 4));
  EXPECT_GE(ProductLowerBound(Rational(1, 2), 80).product, Rational(1, 4));
  EXPECT_THROW(ProductLowerBound(Rational(3, 5), 3), DomainError);
  EXPECT_THROW(ProductLowerBound(Rational(0), 3), DomainError);
}

TEST(OracleTest, Wilson) {
  Interval half = Wilson(5, 10);
  EXPECT_NEAR(half.low, 0.236593, 1e-6);
  EXPECT_NEAR(half.high, 0.763407, 1e-6);
  EXPECT_EQ(Wilson(0, 10).low, 0.0);
  EXPECT_EQ(Wilson(10, 10).high, 1.0);
  EXPECT_NEAR(Wilson(1000, 1000).low, 0.996173, 1e-6);
}

// Renames ring(4) forks and philosophers by one position.
Configuration Rotate(const Configuration& c) {
  Configuration r = c;
  const int k = c.k();
  for (int f = 0; f < k; ++f) {
    ForkState fs = c.forks[f];
    if (fs.holder) fs.holder = PhilosopherId((fs.holder->value() + 1) % k);
    r.forks[(f + 1) % k] = fs;
  }
  for (int p = 0; p < k; ++p) r.philosophers[(p + 1) % k] = c.philosophers[p];
  return r;
}

Configuration Scrambled(std::uint64_t seed) {
  RunSpec spec = Spec(Ring(4), Algorithm::kGDP1, 37, seed);
  spec.adversary.kind = "uniform-random";
  return dpsim::Run(spec).final();
}

TEST(IsomorphismTest, SelfAndRotation) {
  Configuration c = Scrambled(5);
  auto self = ConfigurationIsomorphic(c, c);
  ASSERT_TRUE(self.has_value());
  auto rotated = ConfigurationIsomorphic(c, Rotate(c));
  ASSERT_TRUE(rotated.has_value());
  EXPECT_TRUE(PreservesIncidence(c.topo(), c.topo(), rotated->map));
}

TEST(IsomorphismTest, IdentityWhenNothingIsSymmetric) {
  Configuration c = Scrambled(5);
  c.forks[0].label = 1;
  c.forks[1].label = 2;
  c.forks[2].label = 3;
  c.forks[3].label = 4;
  auto self = ConfigurationIsomorphic(c, c);
  ASSERT_TRUE(self.has_value());
  EXPECT_EQ(self->map, Relabeling::Identity(4, 4));
}

TEST(IsomorphismTest, HeldForkCountIsInvariant) {
  auto t = std::make_shared<const Topology>(Ring(4));
  Configuration a = InitConfiguration(t, Algorithm::kLR1, 4);
  Configuration b = a;
  b.forks[0].holder = PhilosopherId(0);
  b.philosophers[0].holds_left = true;
  b.philosophers[0].line = Layout(Algorithm::kLR1).take_second;
  b.philosophers[0].committed = Side::kLeft;
  EXPECT_FALSE(ConfigurationIsomorphic(a, b).has_value());
  EXPECT_FALSE(ConfigurationIsomorphic(Scrambled(1), Rotate(Scrambled(2))).has_value() &&
               Scrambled(1) == Scrambled(2));
}

TEST(PredicateTest, Parsing) {
  Topology t = Ring(4);
  auto c = InitConfiguration(std::make_shared<const Topology>(t), Algorithm::kGDP1, 4);
  EXPECT_FALSE(ParsePredicate("T", t)(c));
  EXPECT_TRUE(ParsePredicate("!T", t)(c));
  EXPECT_TRUE(ParsePredicate("false | true", t)(c));
  EXPECT_FALSE(ParsePredicate("C[1]", t)(c));
  c.forks = {c.forks[0], c.forks[1], c.forks[2], c.forks[3]};
  for (int f = 0; f < 4; ++f) c.forks[f].label = f % 2 + 1;
  EXPECT_TRUE(ParsePredicate("C[1]", t)(c));
  EXPECT_TRUE(ParsePredicate("C[2,1]", t)(c));
  EXPECT_FALSE(ParsePredicate("C[2]", t)(c));
  EXPECT_EQ(ParsePredicate("T & C[1] | E", t).name, "((T & C[1]) | E)");
  EXPECT_THROW(ParsePredicate("T &", t), ConfigurationError);
  EXPECT_THROW(ParsePredicate("X", t), ConfigurationError);
  EXPECT_THROW(ParsePredicate("E[9]", t), ConfigurationError);
}

TEST(PredicateTest, TryingRangesOverTheProtocol) {
  auto t = std::make_shared<const Topology>(Ring(3));
  Configuration c = InitConfiguration(t, Algorithm::kLR2, 3);
  c.philosophers[0].line = Layout(Algorithm::kLR2).insert;
  c.philosophers[0].hungry = true;
  EXPECT_TRUE(Trying(PhilosopherId(0))(c));
  EXPECT_FALSE(Trying(PhilosopherId(1))(c));
  EXPECT_FALSE(Eating()(c));
}

TEST(UnlessTest, TryingUnlessEatingUnderGDP1) {
  for (const char* kind : {"round-robin", "uniform-random"}) {
    RunSpec spec = Spec(Theta(2, 2, 2), Algorithm::kGDP1, 5000, 3);
    spec.adversary.kind = kind;
    Trace t = dpsim::Run(spec);
    EXPECT_TRUE(CheckUnless(t.history, Trying(), Eating())) << kind;
  }
}

TEST(UnlessTest, EachPhilosopherUnderGDP2) {
  RunSpec spec = Spec(Ring(4), Algorithm::kGDP2, 5000, 4);
  spec.adversary.kind = "uniform-random";
  Trace t = dpsim::Run(spec);
  for (int p = 0; p < 4; ++p) {
    EXPECT_TRUE(CheckUnless(t.history, Trying(PhilosopherId(p)), Eating(PhilosopherId(p))));
  }
}

TEST(UnlessTest, DetectsABrokenProperty) {
  Trace t = dpsim::Run(Spec(Ring(2), Algorithm::kLR1, 200));
  StatePredicate never{"false", [](const Configuration&) { return false; }};
  EXPECT_FALSE(CheckUnless(t.history, Eating(PhilosopherId(0)), never));
  UnlessMonitor m(Eating(), never);
  for (std::size_t i = 0; i <= t.size(); ++i) m.Observe(t.history.SnapshotAt(i));
  ASSERT_TRUE(m.violation().has_value());
}

TEST(ExploreTest, GDP1WithDistinctLabelsAlwaysEats) {
  RunSpec spec = Spec(Ring(3), Algorithm::kGDP1, 1);
  spec.labels = std::vector<int>{1, 2, 3};
  ExploreReport r = ExploreNoEatCycles(InitialConfiguration(spec));
  EXPECT_GT(r.states, 0u);
  EXPECT_TRUE(r.witnesses.empty());
}

TEST(ExploreTest, LR1RingOfTwoHasNoLivelock) {
  ExploreReport r = ExploreNoEatCycles(InitialConfiguration(Spec(Ring(2), Algorithm::kLR1, 1)));
  EXPECT_TRUE(r.witnesses.empty());
}

TEST(ExploreTest, LR1DoubledTriangleHasOne) {
  ExploreReport r =
      ExploreNoEatCycles(InitialConfiguration(Spec(DoubledTriangle(), Algorithm::kLR1, 1)));
  ASSERT_FALSE(r.witnesses.empty());
  const Witness& w = r.witnesses[0];
  std::vector<bool> moved(6, false);
  for (const WitnessStep& s : w.walk) {
    EXPECT_FALSE(IsEatingEvent(s.event));
    moved[s.event.actor.index()] = true;
  }
  for (int p = 0; p < 6; ++p) EXPECT_TRUE(moved[p]) << p;
}

TEST(ExploreTest, RespectsTheStateCap) {
  ExploreCaps caps;
  caps.max_states = 100;
  EXPECT_THROW(
      ExploreNoEatCycles(InitialConfiguration(Spec(DoubledTriangle(), Algorithm::kLR1, 1)), caps),
      CapExceeded);
}

TEST(VerifyTest, Triangle) {
  RunSpec spec = Spec(DoubledTriangle(), Algorithm::kLR1, 1);
  spec.adversary.kind = "stubborn-triangle";
  VerifyReport r = VerifyCounterexample(spec, 3);
  EXPECT_TRUE(r.passed());
  EXPECT_EQ(r.setup_probability, Rational(1, 4));
  for (const BranchReport& b : r.branches) {
    ASSERT_EQ(b.rounds.size(), 3u);
    for (const RoundCheck& c : b.rounds) EXPECT_TRUE(c.mapping.has_value());
  }
}

TEST(VerifyTest, PendantEatsEachRound) {
  RunSpec spec = Spec(RingWithPendant(6), Algorithm::kLR1, 1);
  spec.adversary.kind = "stubborn-pendant-ring";
  VerifyReport r = VerifyCounterexample(spec, 2);
  EXPECT_TRUE(r.passed());
  EXPECT_EQ(r.setup_probability, Rational(1, 32));
  for (const BranchReport& b : r.branches) {
    EXPECT_EQ(b.in_scope_eats, 0);
    for (const RoundCheck& c : b.rounds) EXPECT_GE(c.out_of_scope_eats, 1);
  }
}

TEST(VerifyTest, ThetaKeepsGuestBooksEmpty) {
  RunSpec spec = Spec(Theta(3, 3, 2), Algorithm::kLR2, 1);
  spec.adversary.kind = "stubborn-theta";
  VerifyReport r = VerifyCounterexample(spec, 2);
  EXPECT_TRUE(r.passed());
  for (const BranchReport& b : r.branches) {
    for (const RoundCheck& c : b.rounds) EXPECT_TRUE(c.guest_books_empty);
  }
}

TEST(VerifyTest, NeedsAScript) {
  RunSpec spec = Spec(Ring(3), Algorithm::kLR1, 1);
  EXPECT_THROW(VerifyCounterexample(spec, 1), ConfigurationError);
}

TEST(EstimateTest, GDP1ReachesEating) {
  RunSpec spec = Spec(Ring(4), Algorithm::kGDP1, 5000);
  ProgressStatement ps{Trying(), Eating(), 1};
  EstimateReport r = EstimateProgress(ps, spec, 1000, 5000);
  EXPECT_EQ(r.successes, r.trials);
  EXPECT_EQ(r.skipped, 0u);
  EXPECT_GE(r.ci.low, 0.996);
}

TEST(EstimateTest, EatingLeadsToEating) {
  RunSpec spec = Spec(Ring(3), Algorithm::kLR1, 2000);
  spec.adversary.kind = "uniform-random";
  EstimateReport r = EstimateProgress({Eating(), Eating(), 1}, spec, 200, 1);
  EXPECT_EQ(r.estimate, 1.0);
}

TEST(EstimateTest, StubbornTriangleHoldsLR1Back) {
  RunSpec spec = Spec(DoubledTriangle(), Algorithm::kLR1, 20000);
  spec.adversary.kind = "stubborn-triangle";
  spec.adversary.fairize = true;
  EstimateReport r = EstimateProgress({Trying(), Eating(), 1}, spec, 400, 20000);
  EXPECT_LT(r.ci.high, 0.99);
}

TEST(EstimateTest, WorkerCountDoesNotMatter) {
  RunSpec spec = Spec(Ring(4), Algorithm::kGDP1, 30);
  spec.adversary.kind = "uniform-random";
  EstimateOptions one, four;
  four.workers = 4;
  EstimateReport a = EstimateProgress({Trying(), Eating(), 1}, spec, 300, 10, one);
  EstimateReport b = EstimateProgress({Trying(), Eating(), 1}, spec, 300, 10, four);
  EXPECT_EQ(a.successes, b.successes);
  EXPECT_EQ(a.trials, b.trials);
}

TEST(EstimateTest, ParallelMapKeepsOrderAndErrors) {
  auto squares = ParallelMap(50, 4, [](std::size_t i) { return i * i; });
  for (std::size_t i = 0; i < 50; ++i) EXPECT_EQ(squares[i], i * i);
  EXPECT_THROW(ParallelMap(50, 4,
                           [](std::size_t i) {
                             if (i == 17) throw std::runtime_error("boom");
                             return i;
                           }),
               std::runtime_error);
}

EstimateReport Report(double estimate, double half) {
  EstimateReport r;
  r.trials = 1000;
  r.successes = static_cast<std::uint64_t>(estimate * 1000);
  r.estimate = estimate;
  r.ci = {estimate - half, estimate + half};
  return r;
}

TEST(EstimateTest, LemmaConsistency) {
  EXPECT_TRUE(LemmaConsistency({Report(0.5, 0.01), Report(0.8, 0.01), Report(0.39, 0.01)},
                               Composition::kConcatenation));
  EXPECT_FALSE(LemmaConsistency({Report(0.5, 0.01), Report(0.8, 0.01), Report(0.3, 0.01)},
                                Composition::kConcatenation));
  EXPECT_TRUE(LemmaConsistency({Report(0.6, 0.01), Report(0.7, 0.01), Report(0.6, 0.01)},
                               Composition::kUnion));
  EXPECT_FALSE(LemmaConsistency({Report(0.6, 0.01), Report(0.7, 0.01), Report(0.5, 0.01)},
                                Composition::kUnion));
  EXPECT_THROW(LemmaConsistency({Report(0.5, 0.01)}, Composition::kUnion), ConfigurationError);
}

TEST(EstimateTest, PersistenceWins) {
  EstimateReport positive = Report(0.2, 0.02);
  EXPECT_TRUE(PersistenceWins(positive, Report(0.995, 0.004)));
  EXPECT_FALSE(PersistenceWins(positive, Report(0.9, 0.01)));
  EstimateReport broken = positive;
  broken.unless_failures = 1;
  EXPECT_FALSE(PersistenceWins(broken, Report(0.995, 0.004)));
  EXPECT_FALSE(PersistenceWins(Report(0, 0), Report(0.995, 0.004)));
}

TEST(EstimateTest, NoProgressOnTheTriangle) {
  RunSpec spec = Spec(DoubledTriangle(), Algorithm::kLR1, 100000, 8);
  spec.adversary.kind = "stubborn-triangle";
  spec.adversary.fairize = true;
  NoProgressOptions options;
  options.rounds = 10;
  NoProgressReport r = EstimateNoProgress(spec, 400, options);
  EXPECT_GT(r.successes, 0u);
  EXPECT_LT(r.successes, r.trials);
  EXPECT_EQ(r.fairness_violations, 0u);
  EXPECT_LE(r.max_gap, r.max_full_round);
}

}  // namespace
}  // namespace dpsim
