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

#include "dpsim/scripted.hh"

#include <array>
#include <climits>

#include "dpsim/error.hh"

namespace dpsim {

namespace {

// Step limits for directives that merely walk a philosopher through its
// program; exceeding one means the philosopher is blocked.
constexpr int kWalkSlack = 12;

}  // namespace

ScriptedAdversary::ScriptedAdversary(Topology expected, Algorithm native)
    : expected_(std::move(expected)), native_(native) {
  frame_ = IdentityFrame();
  StartAttempt(0);
}

Relabeling ScriptedAdversary::IdentityFrame() const {
  return Relabeling::Identity(expected_.fork_count(), expected_.philosopher_count());
}

void ScriptedAdversary::CheckApplicable(const Configuration& c) const {
  if (!(c.topo() == expected_)) {
    throw StrategyMismatch(name() + " requires topology " + expected_.name() + ", got " +
                           c.topo().name());
  }
  if (c.algorithm != native_ && !foreign_ok_) {
    throw StrategyMismatch(name() + " is written for " + ToString(native_) + ", not " +
                           ToString(c.algorithm));
  }
  if (c.hunger && !c.hunger->always_hungry()) {
    throw StrategyMismatch(name() + " requires always-hungry philosophers");
  }
}

PhilosopherId ScriptedAdversary::Next(const History& history) {
  for (;;) {
    if (auto p = Advance(history)) return *p;
    Reenter(history.size());
  }
}

std::optional<PhilosopherId> ScriptedAdversary::Advance(const History& history) {
  if (!checked_) {
    CheckApplicable(history.current());
    checked_ = true;
  }
  Observe(history);
  step_ = history.size();
  return Decide(history);
}

void ScriptedAdversary::Reenter(std::size_t step) {
  rounds_.back().end = step;
  StartAttempt(step);
  mode_ = Mode::kDrain;
  drain_steps_ = 0;
  frame_ = IdentityFrame();
  plan_.clear();
  pc_ = 0;
  sub_ = Sub::kStart;
  scheduled_.reset();
}

void ScriptedAdversary::StartAttempt(std::size_t step) {
  ++round_index_;
  RoundRecord r;
  r.start = step;
  r.round = round_index_;
  rounds_.push_back(r);
}

void ScriptedAdversary::LoadSetup() {
  frame_ = IdentityFrame();
  plan_ = SetupPlan();
  pc_ = 0;
  in_setup_ = true;
  sub_ = Sub::kStart;
  draws_ = 0;
  sub_steps_ = 0;
}

int ScriptedAdversary::CurrentBudget() const {
  return retry_limit_ ? retry_limit_(round_index_) : INT_MAX;
}

void ScriptedAdversary::Fail(const std::string& why) {
  rounds_.back().failure = why;
  scheduled_.reset();
  if (wait_after_failure_) {
    mode_ = Mode::kAbandoned;
  } else {
    Reenter(step_);
  }
}

void ScriptedAdversary::FinishDirective() {
  ++pc_;
  sub_ = Sub::kStart;
  draws_ = 0;
  sub_steps_ = 0;
}

void ScriptedAdversary::Observe(const History& history) {
  if (!scheduled_ || history.size() <= scheduled_at_) return;
  const StepEvent& e = history.events()[scheduled_at_];
  scheduled_.reset();
  if (mode_ != Mode::kScript) return;
  ObserveEvent(history.current(), e);
}

bool ScriptedAdversary::CommitmentOk(const StepEvent& e) const {
  return e.action == Action::kCommitRandom && e.side.has_value();
}

void ScriptedAdversary::ObserveEvent(const Configuration& c, const StepEvent& e) {
  const Directive& d = plan_[pc_];
  const PhilosopherId p = Actual(d.role);
  if (e.actor != p) {
    Fail("event by philosopher " + std::to_string(e.actor.value()) + " while directing " +
         std::to_string(p.value()));
    return;
  }
  if (IsEatingEvent(e)) {
    PhilosopherId canonical = Inverse(frame_)(e.actor);
    bool allowed = d.kind == Directive::Kind::kEat ||
                   (d.kind == Directive::Kind::kStubborn && d.may_eat);
    if (InScope(canonical) && !allowed) {
      Fail("philosopher " + std::to_string(e.actor.value()) + " ate during the script");
      return;
    }
  }
  const std::string where = " at directive " + std::to_string(pc_) +
                            (in_setup_ ? " of the setup" : " of the round");
  switch (d.kind) {
    case Directive::Kind::kPrepare:
      break;
    case Directive::Kind::kTake:
      if (e.action == Action::kTestAndTakeFirst && e.success) {
        FinishDirective();
      } else {
        Fail("philosopher " + std::to_string(p.value()) + " could not take its fork" + where);
      }
      break;
    case Directive::Kind::kRelease:
      if (e.action == Action::kReleaseFirst) {
        FinishDirective();
      } else {
        Fail("philosopher " + std::to_string(p.value()) + " did not release" + where);
      }
      break;
    case Directive::Kind::kForced:
    case Directive::Kind::kStubborn:
    case Directive::Kind::kChoose: {
      if (sub_ == Sub::kRecover) break;
      if (!CommitmentOk(e)) {
        Fail("philosopher " + std::to_string(p.value()) + " made no random commitment" + where);
        break;
      }
      ++draws_;
      ForkId drawn = c.topo().fork(p, *e.side);
      if (d.kind == Directive::Kind::kChoose) {
        auto [change, more] = OnChoice(d.role, Inverse(frame_)(drawn));
        frame_ = Compose(frame_, change);
        plan_.insert(plan_.begin() + static_cast<std::ptrdiff_t>(pc_) + 1, more.begin(),
                     more.end());
        FinishDirective();
      } else if (drawn == ActualFork(d.fork)) {
        FinishDirective();
      } else if (d.kind == Directive::Kind::kForced) {
        Fail("forced commitment of philosopher " + std::to_string(p.value()) + " missed" + where);
      } else {
        sub_ = Sub::kRecover;
        sub_steps_ = 0;
      }
      break;
    }
    case Directive::Kind::kEat:
      if (e.action == Action::kReleaseFirst) {
        Fail("philosopher " + std::to_string(p.value()) + " failed to eat" + where);
      } else if (IsEatingEvent(e)) {
        sub_ = Sub::kEating;
      }
      break;
  }
}

std::optional<PhilosopherId> ScriptedAdversary::Decide(const History& history) {
  for (int guard = 0; guard < 100000; ++guard) {
    if (mode_ == Mode::kAbandoned) return std::nullopt;
    const Configuration& c = history.current();
    if (mode_ == Mode::kDrain) {
      if (auto p = DecideDrain(c)) {
        ++drain_steps_;
        scheduled_ = p;
        scheduled_at_ = step_;
        return p;
      }
      mode_ = Mode::kScript;
      LoadSetup();
      continue;
    }
    if (pc_ >= plan_.size()) {
      if (in_setup_) {
        in_setup_ = false;
        setup_ends_.push_back(step_);
        plan_ = RoundPlan();
      } else {
        ++completed_;
        frame_ = Compose(frame_, RoundShift());
        round_ends_.push_back(step_);
        rounds_.back().end = step_;
        rounds_.back().completed = true;
        StartAttempt(step_);
        plan_ = RoundPlan();
      }
      pc_ = 0;
      sub_ = Sub::kStart;
      continue;
    }
    if (auto p = DecideDirective(c)) {
      scheduled_ = p;
      scheduled_at_ = step_;
      return p;
    }
  }
  throw std::logic_error(name() + ": script makes no progress");
}

std::optional<PhilosopherId> ScriptedAdversary::DecideDirective(const Configuration& c) {
  const Directive& d = plan_[pc_];
  const PhilosopherId p = Actual(d.role);
  const PhilosopherState& s = c.phil(p);
  const ProgramLayout& L = c.layout();
  const std::string who = "philosopher " + std::to_string(p.value());
  const int walk_limit = kWalkSlack + 2 * c.options.eat_steps;

  switch (d.kind) {
    case Directive::Kind::kPrepare:
      if (c.AtChoice(p)) {
        FinishDirective();
        return std::nullopt;
      }
      if (s.line >= L.choose || s.think_remaining < 0 || ++sub_steps_ > walk_limit) {
        Fail(who + " is not heading for its choice line");
        return std::nullopt;
      }
      return p;
    case Directive::Kind::kTake:
      if (s.line != L.take_first) {
        Fail(who + " is not waiting to take its first fork");
        return std::nullopt;
      }
      return p;
    case Directive::Kind::kRelease:
      if (s.line != L.take_second) {
        Fail(who + " does not hold a single fork");
        return std::nullopt;
      }
      return p;
    case Directive::Kind::kStubborn:
      if (sub_ == Sub::kRecover) {
        if (c.AtChoice(p)) {
          sub_ = Sub::kStart;
        } else if (++sub_steps_ > walk_limit) {
          Fail(who + " cannot retry its commitment");
          return std::nullopt;
        } else {
          return p;
        }
      }
      if (draws_ >= CurrentBudget()) {
        Fail("stubborn point of " + who + " ran out of retries in round " +
             std::to_string(round_index_));
        return std::nullopt;
      }
      [[fallthrough]];
    case Directive::Kind::kForced:
    case Directive::Kind::kChoose:
      if (!c.AtChoice(p)) {
        Fail(who + " is not at its choice line");
        return std::nullopt;
      }
      sub_ = Sub::kAwaitDraw;
      return p;
    case Directive::Kind::kEat:
      if (sub_ == Sub::kEating && c.AtChoice(p)) {
        FinishDirective();
        return std::nullopt;
      }
      if (++sub_steps_ > walk_limit) {
        Fail(who + " did not complete a meal");
        return std::nullopt;
      }
      return p;
  }
  return std::nullopt;
}

std::optional<PhilosopherId> ScriptedAdversary::DecideDrain(const Configuration& c) {
  const ProgramLayout& L = c.layout();
  const int n = c.n();
  auto first = [&](auto pred) -> std::optional<PhilosopherId> {
    for (int i = 0; i < n; ++i) {
      if (pred(PhilosopherId(i), c.philosophers[i])) return PhilosopherId(i);
    }
    return std::nullopt;
  };
  if (auto p = first([&](PhilosopherId, const PhilosopherState& s) { return s.line >= L.eat; })) {
    return p;
  }
  if (auto p = first([&](PhilosopherId, const PhilosopherState& s) {
        return s.line == L.take_second || (L.relabel && s.line == L.relabel);
      })) {
    return p;
  }
  if (auto p = first([&](PhilosopherId q, const PhilosopherState& s) {
        if (s.line != L.take_first) return false;
        ForkId f = c.CommittedFork(q);
        return c.IsFree(f) && (!UsesRequests(c.algorithm) || Cond(c, f, q));
      })) {
    return p;
  }
  if (auto p = first([&](PhilosopherId, const PhilosopherState& s) {
        return s.line < L.choose && s.think_remaining >= 0;
      })) {
    return p;
  }
  bool settled = true;
  for (int i = 0; i < n; ++i) settled = settled && c.AtChoice(PhilosopherId(i));
  if (settled) return std::nullopt;
  if (drain_steps_ >= 50 * n + 100) return std::nullopt;
  // Nobody holds a fork now, so a philosopher still waiting at its first take
  // is held back by a neighbour's request. Follow the chain of such requests
  // to someone who can move.
  auto p = first([&](PhilosopherId, const PhilosopherState& s) { return s.line == L.take_first; });
  for (int hop = 0; p && hop < n; ++hop) {
    if (c.AtChoice(*p)) return p;
    ForkId f = c.CommittedFork(*p);
    std::optional<PhilosopherId> blocker;
    for (const PhilosopherId q : c.topo().incident(f)) {
      if (q == *p || !c.Requested(f, q)) continue;
      if (!blocker || c.LastUse(f, q) < c.LastUse(f, *blocker)) blocker = q;
    }
    if (!blocker) return p;
    p = blocker;
  }
  return p;
}

std::optional<DrawWish> ScriptedAdversary::Wish() const {
  if (!scheduled_ || mode_ != Mode::kScript || pc_ >= plan_.size() || sub_ != Sub::kAwaitDraw) {
    return std::nullopt;
  }
  const Directive& d = plan_[pc_];
  DrawWish w;
  w.philosopher = *scheduled_;
  switch (d.kind) {
    case Directive::Kind::kChoose:
      w.kind = DrawWish::Kind::kFree;
      return w;
    case Directive::Kind::kForced:
    case Directive::Kind::kStubborn:
      w.kind = d.kind == Directive::Kind::kForced ? DrawWish::Kind::kForced
                                                  : DrawWish::Kind::kStubborn;
      w.side = expected_.SideOf(*scheduled_, ActualFork(d.fork));
      return w;
    default:
      return std::nullopt;
  }
}

std::optional<std::size_t> ScriptedAdversary::FairnessWindow(std::size_t) const {
  return std::nullopt;
}

// Doubled triangle.

namespace {

// Swaps forks 0 and 1 together with the arcs they distinguish.
Relabeling TriangleSwap() { return Relabeling{{1, 0, 2}, {1, 0, 2, 4, 3, 5}}; }

// Role r of the next round is played by the philosopher that played
// philosopher[r] in this one.
Relabeling TriangleShift() { return Relabeling{{0, 2, 1}, {5, 4, 3, 2, 1, 0}}; }

}  // namespace

DoubledTriangleScript::DoubledTriangleScript()
    : ScriptedAdversary(DoubledTriangle(), Algorithm::kLR1) {}

Plan DoubledTriangleScript::SetupPlan() const {
  Plan plan;
  for (int r = 0; r < 6; ++r) plan.push_back(Directive::Prepare(r));
  plan.push_back(Directive::Choose(2));
  return plan;
}

std::pair<Relabeling, Plan> DoubledTriangleScript::OnChoice(int, ForkId drawn) const {
  Relabeling change = drawn == ForkId(0) ? IdentityFrame() : TriangleSwap();
  return {change, {Directive::Take(2), Directive::Forced(1, 1), Directive::Forced(0, 2)}};
}

Plan DoubledTriangleScript::RoundPlan() const {
  return {
      Directive::Stubborn(3, 0), Directive::Take(0),    Directive::Stubborn(4, 2),
      Directive::Take(1),        Directive::Release(2), Directive::Stubborn(5, 1),
      Directive::Release(1),     Directive::Take(3),    Directive::Release(0),
  };
}

Relabeling DoubledTriangleScript::RoundShift() const { return TriangleShift(); }

// Ring with pendant.

PendantRingScript::PendantRingScript(int ring_size)
    : ScriptedAdversary(RingWithPendant(ring_size), Algorithm::kLR1), ring_size_(ring_size) {}

Relabeling PendantRingScript::Mirror() const {
  const int k = ring_size_;
  Relabeling m;
  for (int f = 0; f < k; ++f) m.fork.push_back((k - f) % k);
  m.fork.push_back(k);
  for (int i = 0; i < k; ++i) m.philosopher.push_back(k - 1 - i);
  m.philosopher.push_back(k);
  return m;
}

Plan PendantRingScript::SetupPlan() const {
  Plan plan;
  for (int r = 0; r <= ring_size_; ++r) plan.push_back(Directive::Prepare(r));
  plan.push_back(Directive::Choose(0));
  return plan;
}

std::pair<Relabeling, Plan> PendantRingScript::OnChoice(int, ForkId drawn) const {
  const int k = ring_size_;
  Plan plan;
  Relabeling change = IdentityFrame();
  if (drawn == ForkId(1)) {
    plan.push_back(Directive::Take(0));
    for (int i = 1; i < k; ++i) {
      plan.push_back(Directive::Forced(i, (i + 1) % k));
      plan.push_back(Directive::Take(i));
    }
  } else {
    // The mirror image of the same chain, built from the other end.
    change = Mirror();
    plan.push_back(Directive::Take(k - 1));
    for (int i = k - 2; i >= 0; --i) {
      plan.push_back(Directive::Forced(i, i + 1));
      plan.push_back(Directive::Take(i));
    }
  }
  plan.push_back(Directive::Stubborn(k, 0, true));
  return {change, plan};
}

Plan PendantRingScript::RoundPlan() const {
  const int k = ring_size_;
  Plan plan;
  for (int j = k - 1; j >= 0; --j) {
    plan.push_back(Directive::Release(j));
    plan.push_back(Directive::Stubborn(j, j));
    plan.push_back(Directive::Take(j == k - 1 ? k : j + 1));
  }
  plan.push_back(Directive::Eat(k));
  plan.push_back(Directive::Take(0));
  plan.push_back(Directive::Stubborn(k, 0, true));
  return plan;
}

Relabeling PendantRingScript::RoundShift() const { return Mirror(); }

// Theta.

ThetaScript::ThetaScript(int len1, int len2, int len3)
    : ScriptedAdversary(Theta(len1, len2, len3), Algorithm::kLR2), len_{len1, len2, len3} {
  int arcs = 0, nodes = 2;
  for (int q = 0; q < 3; ++q) {
    arc_base_[q] = arcs;
    node_base_[q] = nodes;
    arcs += len_[q];
    nodes += len_[q] - 1;
  }
}

int ThetaScript::Arc(int q, int j) const { return arc_base_[q] + j - 1; }

int ThetaScript::Node(int q, int j) const {
  if (j == 0) return 0;
  if (j == len_[q]) return 1;
  return node_base_[q] + j - 1;
}

int ThetaScript::StubbornPoints() const { return 2 * (len_[0] + len_[1] + len_[2]) + 1; }

Relabeling ThetaScript::HubSwap() const {
  Relabeling h = IdentityFrame();
  for (int q = 0; q < 3; ++q) {
    for (int j = 0; j <= len_[q]; ++j) h.fork[Node(q, j)] = Node(q, len_[q] - j);
    for (int j = 1; j <= len_[q]; ++j) h.philosopher[Arc(q, j)] = Arc(q, len_[q] + 1 - j);
  }
  return h;
}

Plan ThetaScript::HalfRound(int bh, int ah, int mid) const {
  Plan plan;
  for (int j = len_[bh]; j >= 1; --j) {
    plan.push_back(Directive::Release(Arc(bh, j)));
    plan.push_back(Directive::Stubborn(Arc(bh, j), Node(bh, j - 1)));
    plan.push_back(Directive::Take(j == len_[bh] ? Arc(mid, len_[mid]) : Arc(bh, j + 1)));
  }
  for (int j = 1; j <= len_[ah]; ++j) {
    plan.push_back(Directive::Release(Arc(ah, j)));
    plan.push_back(Directive::Stubborn(Arc(ah, j), Node(ah, j)));
    plan.push_back(Directive::Take(j == 1 ? Arc(bh, 1) : Arc(ah, j - 1)));
  }
  return plan;
}

Plan ThetaScript::RoundPlan() const {
  Plan plan;
  for (auto [bh, ah, mid] : {std::array{0, 1, 2}, std::array{2, 0, 1}, std::array{1, 2, 0}}) {
    Plan half = HalfRound(bh, ah, mid);
    plan.insert(plan.end(), half.begin(), half.end());
  }
  return plan;
}

Relabeling ThetaScript::RoundShift() const { return IdentityFrame(); }

// Canonical blockade: path 0 holds its B-side forks, path 1 its A-side forks,
// path 2 its B-side forks except the last philosopher, who is committed to B.
Plan ThetaScript::Chain(int bh, int ah, int mid, int skip_path, int skip_index) const {
  Plan plan;
  auto skip = [&](int q, int j) { return q == skip_path && j == skip_index; };
  for (int j = 1; j <= len_[ah]; ++j) {
    if (skip(ah, j)) continue;
    plan.push_back(Directive::Forced(Arc(ah, j), Node(ah, j - 1)));
    plan.push_back(Directive::Take(Arc(ah, j)));
  }
  for (int j = len_[bh]; j >= 1; --j) {
    if (skip(bh, j)) continue;
    plan.push_back(Directive::Forced(Arc(bh, j), Node(bh, j)));
    plan.push_back(Directive::Take(Arc(bh, j)));
  }
  const int lm = len_[mid];
  if (lm == 1) {
    plan.push_back(Directive::Forced(Arc(mid, 1), 1));
  } else {
    plan.push_back(Directive::Stubborn(Arc(mid, lm), 1));
    for (int j = lm - 1; j >= 1; --j) {
      if (skip(mid, j)) continue;
      plan.push_back(Directive::Forced(Arc(mid, j), Node(mid, j)));
      plan.push_back(Directive::Take(Arc(mid, j)));
    }
  }
  return plan;
}

Plan ThetaScript::SetupPlan() const {
  Plan plan;
  for (int r = 0; r < topology().philosopher_count(); ++r) plan.push_back(Directive::Prepare(r));
  // The middle arc of an odd path is mapped onto itself, sides exchanged, by
  // the hub swap, so its first commitment is free.
  for (int q = 0; q < 3; ++q) {
    if (len_[q] % 2 == 1 && (q < 2 || len_[q] > 1)) {
      plan.push_back(Directive::Choose(Arc(q, (len_[q] + 1) / 2)));
      return plan;
    }
  }
  Plan chain = Chain(0, 1, 2, -1, -1);
  plan.insert(plan.end(), chain.begin(), chain.end());
  return plan;
}

std::pair<Relabeling, Plan> ThetaScript::OnChoice(int role, ForkId drawn) const {
  int q = 0;
  while (!(role >= arc_base_[q] && role < arc_base_[q] + len_[q])) ++q;
  const int j = role - arc_base_[q] + 1;
  const int target = q == 1 ? Node(q, j - 1) : Node(q, j);
  Relabeling change = drawn == ForkId(target) ? IdentityFrame() : HubSwap();
  Plan plan{Directive::Take(role)};
  Plan chain = Chain(0, 1, 2, q, j);
  plan.insert(plan.end(), chain.begin(), chain.end());
  return {change, plan};
}

// Fairization.

FairizedAdversary::FairizedAdversary(std::unique_ptr<ScriptedAdversary> inner,
                                     StubbornnessBudget budget)
    : inner_(std::move(inner)), budget_(std::move(budget)) {
  inner_->SetRetryLimit([b = budget_](int k) { return b(k); });
  inner_->SetAbandonOnFailure(true);
  inner_->AllowForeignAlgorithm();
}

PhilosopherId FairizedAdversary::Next(const History& history) {
  const int n = history.current().n();
  for (int guard = 0; guard < 1000; ++guard) {
    if (!rotating_) {
      if (auto p = inner_->Advance(history)) {
        last_from_inner_ = true;
        return *p;
      }
      rotating_ = true;
      rotation_left_ = n;
    }
    if (rotation_left_ > 0) {
      last_from_inner_ = false;
      return PhilosopherId(n - rotation_left_--);
    }
    rotating_ = false;
    inner_->Reenter(history.size());
  }
  throw std::logic_error(name() + ": script keeps failing without scheduling");
}

std::optional<DrawWish> FairizedAdversary::Wish() const {
  return last_from_inner_ ? inner_->Wish() : std::nullopt;
}

std::optional<std::size_t> FairizedAdversary::FairnessWindow(std::size_t trace_length) const {
  return RoundPairWindow(inner_->rounds(), trace_length);
}

std::unique_ptr<ScriptedAdversary> StubbornDoubledTriangle() {
  return std::make_unique<DoubledTriangleScript>();
}

std::unique_ptr<ScriptedAdversary> StubbornPendantRing(int ring_size) {
  return std::make_unique<PendantRingScript>(ring_size);
}

std::unique_ptr<ScriptedAdversary> StubbornTheta(int len1, int len2, int len3) {
  return std::make_unique<ThetaScript>(len1, len2, len3);
}

std::unique_ptr<FairizedAdversary> Fairize(std::unique_ptr<ScriptedAdversary> inner,
                                           std::optional<StubbornnessBudget> budget) {
  StubbornnessBudget b =
      budget ? *budget : StubbornnessBudget::UnionBound(inner->StubbornPoints());
  return std::make_unique<FairizedAdversary>(std::move(inner), std::move(b));
}

}  // namespace dpsim
