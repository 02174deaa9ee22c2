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

#include <sstream>

#include "dpsim/error.hh"

namespace dpsim {

namespace {

constexpr ProgramLayout kLR1Layout{1, 0, 2, 3, 0, 4, 5, 0, 0, 6};
constexpr ProgramLayout kLR2Layout{1, 2, 3, 4, 0, 5, 6, 7, 8, 9};
constexpr ProgramLayout kGDP1Layout{1, 0, 2, 3, 4, 5, 6, 0, 0, 7};
constexpr ProgramLayout kGDP2Layout{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};

[[noreturn]] void Violation(const std::string& what) { throw InvariantViolation(what); }

std::string Who(PhilosopherId p) { return "philosopher " + std::to_string(p.value()); }
std::string Which(ForkId f) { return "fork " + std::to_string(f.value()); }

void SetHolds(PhilosopherState& s, Side side, bool value) {
  (side == Side::kLeft ? s.holds_left : s.holds_right) = value;
}

// Enters the think line and loads the next think duration.
void StartThinking(const Configuration& c, PhilosopherId p, PhilosopherState& s) {
  s.line = c.layout().think;
  s.hungry = false;
  s.committed.reset();
  s.think_remaining = c.hunger ? c.hunger->Duration(p, s.think_episode) : 0;
}

}  // namespace

const char* ToString(Algorithm a) {
  switch (a) {
    case Algorithm::kLR1: return "LR1";
    case Algorithm::kLR2: return "LR2";
    case Algorithm::kGDP1: return "GDP1";
    case Algorithm::kGDP2: return "GDP2";
  }
  return "?";
}

Algorithm ParseAlgorithm(const std::string& name) {
  for (Algorithm a : {Algorithm::kLR1, Algorithm::kLR2, Algorithm::kGDP1, Algorithm::kGDP2}) {
    if (name == ToString(a)) return a;
  }
  throw ConfigurationError("unknown algorithm '" + name + "' (expected LR1, LR2, GDP1 or GDP2)");
}

const ProgramLayout& Layout(Algorithm a) {
  switch (a) {
    case Algorithm::kLR1: return kLR1Layout;
    case Algorithm::kLR2: return kLR2Layout;
    case Algorithm::kGDP1: return kGDP1Layout;
    case Algorithm::kGDP2: return kGDP2Layout;
  }
  return kLR1Layout;
}

int HungerModel::Duration(PhilosopherId p, int episode) const {
  if (always_hungry()) return 0;
  if (p.index() >= think_durations.size()) return 0;
  const auto& list = think_durations[p.index()];
  if (episode < 0 || static_cast<std::size_t>(episode) >= list.size()) return -1;
  return list[episode];
}

ForkId Configuration::CommittedFork(PhilosopherId p) const {
  const auto& s = phil(p);
  if (!s.committed) Violation(Who(p) + " has no committed fork");
  return topo().fork(p, *s.committed);
}

bool Configuration::Requested(ForkId f, PhilosopherId p) const {
  Side s = topo().SideOf(p, f);
  return fork(f).requested[topo().slot(p, s)] != 0;
}

std::uint64_t Configuration::LastUse(ForkId f, PhilosopherId p) const {
  Side s = topo().SideOf(p, f);
  return fork(f).last_use[topo().slot(p, s)];
}

bool Configuration::AtChoice(PhilosopherId p) const {
  const auto& s = phil(p);
  return s.line == layout().choose && !s.committed && s.held_count() == 0;
}

bool Configuration::Trying(PhilosopherId p) const {
  int line = phil(p).line;
  return line > layout().think && line <= layout().take_second;
}

bool operator==(const Configuration& a, const Configuration& b) {
  bool same_topology = a.topology == b.topology ||
                       (a.topology && b.topology && *a.topology == *b.topology);
  bool same_hunger =
      a.hunger == b.hunger ||
      (a.hunger && b.hunger && a.hunger->think_durations == b.hunger->think_durations);
  return same_topology && same_hunger && a.algorithm == b.algorithm &&
         a.label_bound == b.label_bound && a.options.eat_steps == b.options.eat_steps &&
         a.options.left_bias == b.options.left_bias && a.forks == b.forks &&
         a.philosophers == b.philosophers;
}

Configuration InitConfiguration(std::shared_ptr<const Topology> topology, Algorithm algorithm,
                                int label_bound, HungerModel hunger, ProtocolOptions options) {
  if (!topology) throw ConfigurationError("no topology");
  Validate(*topology);
  if (UsesLabels(algorithm) && label_bound < topology->fork_count()) {
    throw ConfigurationError("label bound m = " + std::to_string(label_bound) +
                             " is below the fork count k = " +
                             std::to_string(topology->fork_count()) + " required by " +
                             ToString(algorithm));
  }
  if (options.eat_steps < 1) throw ConfigurationError("eat steps must be at least 1");
  if (!(options.left_bias > 0.0 && options.left_bias < 1.0)) {
    throw ConfigurationError("draw bias must lie strictly between 0 and 1");
  }
  if (!hunger.always_hungry() &&
      hunger.think_durations.size() != static_cast<std::size_t>(topology->philosopher_count())) {
    throw ConfigurationError("hunger schedule must list every philosopher");
  }
  Configuration c;
  c.topology = std::move(topology);
  c.hunger = std::make_shared<const HungerModel>(std::move(hunger));
  c.algorithm = algorithm;
  c.label_bound = label_bound;
  c.options = options;
  const Topology& t = *c.topology;
  c.forks.resize(t.fork_count());
  for (int f = 0; f < t.fork_count(); ++f) {
    c.forks[f].requested.assign(t.degree(ForkId(f)), 0);
    c.forks[f].last_use.assign(t.degree(ForkId(f)), 0);
  }
  c.philosophers.resize(t.philosopher_count());
  for (int p = 0; p < t.philosopher_count(); ++p) {
    StartThinking(c, PhilosopherId(p), c.philosophers[p]);
  }
  return c;
}

const char* ToString(Action a) {
  switch (a) {
    case Action::kThink: return "think";
    case Action::kGetHungry: return "getHungry";
    case Action::kInsertRequest: return "insertRequests";
    case Action::kCommitRandom: return "commitRandom";
    case Action::kCommitPriority: return "commitPriority";
    case Action::kTestAndTakeFirst: return "testAndTakeFirst";
    case Action::kCondFail: return "condFail";
    case Action::kRelabel: return "relabel";
    case Action::kKeepLabel: return "keepLabel";
    case Action::kTestAndTakeSecond: return "testAndTakeSecond";
    case Action::kReleaseFirst: return "releaseFirst";
    case Action::kEatTick: return "eatTick";
    case Action::kFinishEat: return "finishEat";
    case Action::kRemoveRequests: return "removeRequests";
    case Action::kSignGuestBooks: return "signGuestBooks";
    case Action::kReleaseBoth: return "releaseBoth";
  }
  return "?";
}

std::string StepEvent::Outcome() const {
  switch (action) {
    case Action::kCommitRandom:
    case Action::kCommitPriority:
    case Action::kInsertRequest:
    case Action::kReleaseFirst:
      return side ? ToString(*side) : "-";
    case Action::kTestAndTakeFirst:
    case Action::kTestAndTakeSecond:
      return success ? "taken" : "busy";
    case Action::kRelabel:
      return std::to_string(old_label) + ">" + std::to_string(new_label);
    default:
      return "-";
  }
}

std::string StepEvent::DrawText() const { return draw ? std::to_string(*draw) : "-"; }

bool IsEatingEvent(const StepEvent& e) { return e.action == Action::kFinishEat; }

StreamDraws::StreamDraws(std::uint64_t seed, int philosophers) {
  streams_.reserve(philosophers);
  for (int i = 0; i < philosophers; ++i) {
    streams_.emplace_back(DeriveSeed(seed, static_cast<std::uint64_t>(i)));
  }
}

Side StreamDraws::DrawSide(PhilosopherId p, double left_bias) {
  return streams_[p.index()].Bernoulli(left_bias) ? Side::kLeft : Side::kRight;
}

int StreamDraws::DrawLabel(PhilosopherId p, int m) {
  return static_cast<int>(streams_[p.index()].UniformInt(1, m));
}

Side FixedDraws::DrawSide(PhilosopherId, double) {
  if (!value_) throw std::logic_error("replayed step has no recorded draw");
  return *value_ == 0 ? Side::kLeft : Side::kRight;
}

int FixedDraws::DrawLabel(PhilosopherId, int) {
  if (!value_) throw std::logic_error("replayed step has no recorded draw");
  return static_cast<int>(*value_);
}

bool Enabled(const Configuration& c, PhilosopherId p) {
  int line = c.phil(p).line;
  return line >= 1 && line <= c.layout().release;
}

bool Cond(const Configuration& c, ForkId f, PhilosopherId p) {
  const ForkState& fs = c.fork(f);
  const auto incident = c.topo().incident(f);
  const std::uint64_t mine = c.LastUse(f, p);
  for (std::size_t j = 0; j < incident.size(); ++j) {
    if (incident[j] == p || !fs.requested[j]) continue;
    if (fs.last_use[j] < mine) return false;
  }
  return true;
}

StepEvent StepInPlace(Configuration& c, PhilosopherId p, DrawSource& draws) {
  const Topology& t = c.topo();
  const ProgramLayout& L = c.layout();
  PhilosopherState& s = c.philosophers[p.index()];
  StepEvent e;
  e.actor = p;
  const int line = s.line;

  if (line == L.think) {
    if (s.think_remaining != 0) {
      if (s.think_remaining > 0) --s.think_remaining;
      e.action = Action::kThink;
      return e;
    }
    ++s.think_episode;
    s.hungry = true;
    s.line = L.insert ? L.insert : L.choose;
    e.action = Action::kGetHungry;
    return e;
  }

  if (line == L.insert) {
    Side side = s.inserted == 0 ? Side::kLeft : Side::kRight;
    ForkId f = t.fork(p, side);
    c.forks[f.index()].requested[t.slot(p, side)] = 1;
    e.action = Action::kInsertRequest;
    e.side = side;
    if (s.inserted == 0) {
      s.inserted = 1;
    } else {
      s.inserted = 0;
      s.line = L.choose;
    }
    return e;
  }

  if (line == L.choose) {
    if (UsesLabels(c.algorithm)) {
      int l = c.fork(t.fork(p, Side::kLeft)).label;
      int r = c.fork(t.fork(p, Side::kRight)).label;
      s.committed = l > r ? Side::kLeft : Side::kRight;
      e.action = Action::kCommitPriority;
    } else {
      s.committed = draws.DrawSide(p, c.options.left_bias);
      e.action = Action::kCommitRandom;
      e.draw = *s.committed == Side::kLeft ? 0 : 1;
    }
    e.side = s.committed;
    s.line = L.take_first;
    return e;
  }

  if (line == L.take_first) {
    if (!s.committed) Violation(Who(p) + " at first take without commitment");
    ForkId f = t.fork(p, *s.committed);
    if (!c.IsFree(f)) {
      e.action = Action::kTestAndTakeFirst;
      e.success = false;
      return e;
    }
    if (UsesRequests(c.algorithm) && !Cond(c, f, p)) {
      e.action = Action::kCondFail;
      return e;
    }
    c.forks[f.index()].holder = p;
    SetHolds(s, *s.committed, true);
    s.line = L.relabel ? L.relabel : L.take_second;
    e.action = Action::kTestAndTakeFirst;
    e.side = s.committed;
    e.success = true;
    return e;
  }

  if (line == L.relabel) {
    ForkId held = t.fork(p, *s.committed);
    ForkId other = t.fork(p, Other(*s.committed));
    int& label = c.forks[held.index()].label;
    e.old_label = label;
    if (label == c.fork(other).label) {
      int fresh = draws.DrawLabel(p, c.label_bound);
      label = fresh;
      e.action = Action::kRelabel;
      e.draw = fresh;
    } else {
      e.action = Action::kKeepLabel;
    }
    e.new_label = label;
    s.line = L.take_second;
    return e;
  }

  if (line == L.take_second) {
    Side first = *s.committed;
    ForkId other = t.fork(p, Other(first));
    if (c.IsFree(other)) {
      c.forks[other.index()].holder = p;
      SetHolds(s, Other(first), true);
      s.line = L.eat;
      s.eat_remaining = c.options.eat_steps;
      e.action = Action::kTestAndTakeSecond;
      e.side = Other(first);
      e.success = true;
      return e;
    }
    ForkId held = t.fork(p, first);
    c.forks[held.index()].holder.reset();
    SetHolds(s, first, false);
    s.committed.reset();
    s.line = L.choose;
    e.action = Action::kReleaseFirst;
    e.side = first;
    return e;
  }

  if (line == L.eat) {
    if (s.eat_remaining > 1) {
      --s.eat_remaining;
      e.action = Action::kEatTick;
      return e;
    }
    s.eat_remaining = 0;
    s.line = L.remove ? L.remove : L.release;
    e.action = Action::kFinishEat;
    return e;
  }

  if (line == L.remove) {
    for (Side side : {Side::kLeft, Side::kRight}) {
      c.forks[t.fork(p, side).index()].requested[t.slot(p, side)] = 0;
    }
    s.line = L.sign;
    e.action = Action::kRemoveRequests;
    return e;
  }

  if (line == L.sign) {
    for (Side side : {Side::kLeft, Side::kRight}) {
      ForkState& fs = c.forks[t.fork(p, side).index()];
      ++fs.use_clock;
      fs.last_use[t.slot(p, side)] = fs.use_clock;
    }
    s.line = L.release;
    e.action = Action::kSignGuestBooks;
    return e;
  }

  if (line == L.release) {
    for (Side side : {Side::kLeft, Side::kRight}) {
      c.forks[t.fork(p, side).index()].holder.reset();
      SetHolds(s, side, false);
    }
    StartThinking(c, p, s);
    e.action = Action::kReleaseBoth;
    return e;
  }

  Violation(Who(p) + " has malformed program counter " + std::to_string(line));
}

std::pair<Configuration, StepEvent> Step(const Configuration& c, PhilosopherId p,
                                         DrawSource& draws) {
  Configuration next = c;
  StepEvent e = StepInPlace(next, p, draws);
  return {std::move(next), e};
}

void ReplayEvent(Configuration& c, const StepEvent& e) {
  FixedDraws draws(e.draw);
  StepEvent again = StepInPlace(c, e.actor, draws);
  if (!(again == e)) {
    throw InvariantViolation("replay of step by " + Who(e.actor) + " produced " +
                             ToString(again.action) + " instead of " + ToString(e.action));
  }
}

void CheckInvariants(const Configuration& c) {
  const Topology& t = c.topo();
  const ProgramLayout& L = c.layout();
  for (int fi = 0; fi < c.k(); ++fi) {
    ForkId f(fi);
    const ForkState& fs = c.fork(f);
    if (fs.holder) {
      PhilosopherId h = *fs.holder;
      if (h.value() < 0 || h.value() >= c.n()) Violation(Which(f) + " held by unknown philosopher");
      const Arc& a = t.arc(h);
      if (a.left != f && a.right != f) Violation(Which(f) + " held by non-adjacent " + Who(h));
      if (!c.phil(h).holds(t.SideOf(h, f))) {
        Violation(Which(f) + " lists " + Who(h) + " as holder but the philosopher disagrees");
      }
    }
    if (fs.label < 0 || fs.label > std::max(c.label_bound, 0)) {
      Violation(Which(f) + " label " + std::to_string(fs.label) + " out of range");
    }
    for (std::uint64_t u : fs.last_use) {
      if (u > fs.use_clock) Violation(Which(f) + " guest book ahead of its use clock");
    }
    if (!UsesRequests(c.algorithm)) {
      for (char r : fs.requested) {
        if (r) Violation(Which(f) + " has requests under " + std::string(ToString(c.algorithm)));
      }
      if (fs.use_clock != 0) Violation(Which(f) + " has guest-book entries");
    }
  }
  for (int pi = 0; pi < c.n(); ++pi) {
    PhilosopherId p(pi);
    const PhilosopherState& s = c.phil(p);
    if (!Enabled(c, p)) Violation(Who(p) + " at invalid line " + std::to_string(s.line));
    for (Side side : {Side::kLeft, Side::kRight}) {
      const auto& holder = c.fork(t.fork(p, side)).holder;
      if (s.holds(side) != (holder && *holder == p)) {
        Violation(Who(p) + " holding flag for " + ToString(side) + " disagrees with fork");
      }
    }
    const int line = s.line;
    const bool holds_two_lines = line >= L.eat && line <= L.release;
    const bool holds_one_lines = line == L.take_second || (L.relabel && line == L.relabel);
    int expected = holds_two_lines ? 2 : holds_one_lines ? 1 : 0;
    if (s.held_count() != expected) {
      Violation(Who(p) + " holds " + std::to_string(s.held_count()) + " forks at line " +
                std::to_string(line));
    }
    if (expected == 1 && !s.holds(*s.committed)) {
      Violation(Who(p) + " holds the fork it did not commit to");
    }
    const bool committed_lines = line >= L.take_first && line <= L.release;
    if (s.committed.has_value() != committed_lines) {
      Violation(Who(p) + " commitment inconsistent with line " + std::to_string(line));
    }
    if (s.eat_remaining < 0 || (s.eat_remaining > 0) != (line == L.eat)) {
      Violation(Who(p) + " eat counter inconsistent with line " + std::to_string(line));
    }
    if (s.hungry != (line != L.think)) Violation(Who(p) + " hunger flag inconsistent");
    if (UsesRequests(c.algorithm)) {
      for (Side side : {Side::kLeft, Side::kRight}) {
        bool expected_request = (line == L.insert && s.inserted == 1 && side == Side::kLeft) ||
                                (line >= L.choose && line <= L.remove);
        bool actual = c.fork(t.fork(p, side)).requested[t.slot(p, side)] != 0;
        if (expected_request != actual) {
          Violation(Who(p) + " request on its " + ToString(side) + " fork inconsistent with line " +
                    std::to_string(line));
        }
      }
    }
  }
}

void CheckTransition(const Configuration& before, const Configuration& after,
                     const StepEvent& e) {
  const Topology& t = before.topo();
  for (int fi = 0; fi < before.k(); ++fi) {
    ForkId f(fi);
    const ForkState& b = before.fork(f);
    const ForkState& a = after.fork(f);
    if (a.label != b.label) {
      if (e.action != Action::kRelabel) Violation(Which(f) + " relabelled outside a relabel step");
      const PhilosopherState& s = before.phil(e.actor);
      if (!s.committed || t.fork(e.actor, *s.committed) != f || !(b.holder == e.actor)) {
        Violation(Which(f) + " relabelled by a philosopher not holding it");
      }
      ForkId other = t.fork(e.actor, Other(*s.committed));
      if (before.fork(other).label != b.label) {
        Violation(Which(f) + " relabelled although the labels differed");
      }
      if (a.label < 1 || a.label > before.label_bound) Violation(Which(f) + " new label out of range");
    }
    for (std::size_t j = 0; j < b.last_use.size(); ++j) {
      if (a.last_use[j] < b.last_use[j]) Violation(Which(f) + " guest book went backwards");
    }
  }
  if (e.action == Action::kCommitPriority) {
    int chosen = before.fork(t.fork(e.actor, *e.side)).label;
    int other = before.fork(t.fork(e.actor, Other(*e.side))).label;
    if (chosen < other) Violation(Who(e.actor) + " committed to the lower label");
  }
  for (int pi = 0; pi < after.n(); ++pi) {
    if (after.philosophers[pi].held_count() > 2) Violation(Who(PhilosopherId(pi)) + " holds > 2");
  }
}

}  // namespace dpsim
