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

#ifndef DPSIM_ANALYSIS_PREDICATES_HH_
#define DPSIM_ANALYSIS_PREDICATES_HH_

#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "dpsim/adversary.hh"

namespace dpsim {

struct StatePredicate {
  std::string name;
  std::function<bool(const Configuration&)> eval;

  bool operator()(const Configuration& c) const { return eval(c); }
};

// Some philosopher is trying: past the think line, not yet eating. For LR1 and
// GDP1 this is the choice line through the second take; for LR2 and GDP2 it
// starts at the request line.
StatePredicate Trying();
StatePredicate Eating();
StatePredicate Trying(PhilosopherId p);
StatePredicate Eating(PhilosopherId p);

// At least r cycles of the topology have distinct nr labels at the two ends
// of every arc. Cycles are enumerated once, for the topology given.
StatePredicate DistinctCycles(const Topology& t, int r);
// The same, counting only cycles through arc p.
StatePredicate DistinctCycles(const Topology& t, PhilosopherId p, int r);

// At least s philosophers sharing a fork with p have eaten and are now
// blocked by Cond on one of their forks.
StatePredicate Waiting(const Topology& t, PhilosopherId p, int s);

StatePredicate And(StatePredicate a, StatePredicate b);
StatePredicate Or(StatePredicate a, StatePredicate b);
StatePredicate Not(StatePredicate a);

/**
 * Parses predicate expressions such as "T & C[1] | E". Atoms: T, E, T[i],
 * E[i], C[r], C[i,r], W[i,s], true, false; operators !, &, | (tightest
 * first) and parentheses.
 */
StatePredicate ParsePredicate(const std::string& text, const Topology& t);

// Incremental check of "s unless s2" over a sequence of configurations: from
// any state in s and not in s2, the next state is in s or in s2.
class UnlessMonitor {
 public:
  UnlessMonitor(StatePredicate s, StatePredicate s2) : s_(std::move(s)), s2_(std::move(s2)) {}

  void Observe(const Configuration& c);
  bool holds() const { return !violation_; }
  // Index of the first configuration that broke the property.
  std::optional<std::size_t> violation() const { return violation_; }

 private:
  StatePredicate s_, s2_;
  std::size_t index_ = 0;
  bool armed_ = false;
  std::optional<std::size_t> violation_;
};

bool CheckUnless(const History& history, const StatePredicate& s, const StatePredicate& s2);

}  // namespace dpsim

#endif /* DPSIM_ANALYSIS_PREDICATES_HH_ */
