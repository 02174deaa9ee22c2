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

#include "dpsim/analysis/verify.hh"

#include <algorithm>

#include "dpsim/error.hh"
#include "dpsim/scripted.hh"

namespace dpsim {

namespace {

class ForcingDraws : public DrawSource {
 public:
  ForcingDraws(const Adversary& adversary, Rational left_bias, std::vector<Side> prefix)
      : adversary_(adversary), left_(std::move(left_bias)), prefix_(std::move(prefix)) {}

  Side DrawSide(PhilosopherId p, double) override {
    auto wish = adversary_.Wish();
    if (wish && wish->philosopher == p && wish->side) {
      if (wish->kind == DrawWish::Kind::kForced) {
        probability_ *= Factor(*wish->side);
        ++forced_;
      } else {
        ++stubborn_;
      }
      return *wish->side;
    }
    Side s = free_ < prefix_.size() ? prefix_[free_] : Side::kLeft;
    ++free_;
    probability_ *= Factor(s);
    return s;
  }

  int DrawLabel(PhilosopherId, int) override { return 1; }

  const Rational& probability() const { return probability_; }
  std::size_t free_draws() const { return free_; }
  int forced() const { return forced_; }
  int stubborn() const { return stubborn_; }

 private:
  Rational Factor(Side s) const { return s == Side::kLeft ? left_ : 1 - left_; }

  const Adversary& adversary_;
  Rational left_;
  std::vector<Side> prefix_;
  std::size_t free_ = 0;
  Rational probability_ = 1;
  int forced_ = 0;
  int stubborn_ = 0;
};

BranchReport RunBranch(const RunSpec& spec, int rounds, std::size_t step_cap,
                       const std::vector<Side>& prefix, std::size_t& free_draws) {
  BranchReport b;
  b.choices = prefix;
  auto script = MakeScriptedAdversary(spec);
  RunSpec ts = spec;
  ts.horizon = step_cap;
  ForcingDraws draws(*script, spec.draw_bias, prefix);
  RunOptions ro;
  ro.checked = true;
  ro.stop = [&](const History&, const Adversary&) {
    for (const RoundRecord& r : script->rounds()) {
      if (!r.failure.empty()) return true;
    }
    return script->completed_rounds() >= rounds;
  };
  Trace trace = Run(ts, *script, draws, ro);
  free_draws = draws.free_draws();
  b.probability = draws.probability();
  b.forced_draws = draws.forced();
  b.stubborn_draws = draws.stubborn();
  b.choices.resize(std::max(prefix.size(), free_draws), Side::kLeft);

  for (const RoundRecord& r : script->rounds()) {
    if (!r.failure.empty()) {
      b.failure = "round " + std::to_string(r.round) + ": " + r.failure;
      return b;
    }
  }
  if (script->completed_rounds() < rounds) {
    b.failure = "only " + std::to_string(script->completed_rounds()) + " of " +
                std::to_string(rounds) + " rounds completed within " + std::to_string(step_cap) +
                " steps";
    return b;
  }

  const History& h = trace.history;
  const Topology& topo = *spec.topology;
  const int n = topo.philosopher_count();
  std::vector<bool> in_scope(n);
  bool has_outsiders = false;
  for (int p = 0; p < n; ++p) {
    in_scope[p] = script->InScope(PhilosopherId(p));
    has_outsiders = has_outsiders || !in_scope[p];
  }
  b.setup_end = script->setup_ends().front();
  for (std::size_t i = b.setup_end; i < h.size(); ++i) {
    const StepEvent& e = h.events()[i];
    if (IsEatingEvent(e) && in_scope[e.actor.index()]) ++b.in_scope_eats;
  }
  if (b.in_scope_eats > 0) {
    b.failure = std::to_string(b.in_scope_eats) + " in-scope meals after the setup";
  }

  std::size_t start = b.setup_end;
  Configuration before = h.SnapshotAt(start);
  for (int k = 0; k < rounds; ++k) {
    RoundCheck rc;
    rc.round = k + 1;
    rc.start = start;
    rc.end = script->round_ends()[k];
    Configuration after = h.SnapshotAt(rc.end);
    rc.mapping = ConfigurationIsomorphic(after, before);
    for (std::size_t i = rc.start; i < rc.end; ++i) {
      const StepEvent& e = h.events()[i];
      if (IsEatingEvent(e) && !in_scope[e.actor.index()]) ++rc.out_of_scope_eats;
    }
    for (int f = 0; f < topo.fork_count(); ++f) {
      auto inc = topo.incident(ForkId(f));
      if (!std::all_of(inc.begin(), inc.end(), [&](PhilosopherId q) { return in_scope[q.index()]; })) {
        continue;
      }
      const auto& book = after.forks[f].last_use;
      if (std::any_of(book.begin(), book.end(), [](std::uint64_t v) { return v != 0; })) {
        rc.guest_books_empty = false;
      }
    }
    std::string where = "round " + std::to_string(rc.round) + ": ";
    if (b.failure.empty()) {
      if (!rc.mapping) {
        b.failure = where + "end configuration is not isomorphic to the start";
      } else if (has_outsiders && rc.out_of_scope_eats == 0) {
        b.failure = where + "no out-of-scope philosopher ate";
      } else if (UsesRequests(spec.algorithm) && !rc.guest_books_empty) {
        b.failure = where + "a guest book of an in-scope fork is not empty";
      }
    }
    b.rounds.push_back(std::move(rc));
    start = b.rounds.back().end;
    before = std::move(after);
  }
  return b;
}

}  // namespace

bool VerifyReport::passed() const {
  return !branches.empty() &&
         std::all_of(branches.begin(), branches.end(), [](const BranchReport& b) { return b.passed(); });
}

VerifyReport VerifyCounterexample(const RunSpec& spec, int rounds, std::size_t step_cap) {
  if (rounds < 1) throw ConfigurationError("verification needs at least one round");
  auto probe = MakeScriptedAdversary(spec);
  if (!probe) {
    throw ConfigurationError("verification needs a scripted adversary, got " +
                             spec.adversary.kind);
  }
  VerifyReport report;
  report.strategy = probe->name();
  report.topology = spec.topology->name();
  report.algorithm = ToString(spec.algorithm);
  report.rounds = rounds;
  report.setup_probability = 0;

  // Every pattern of free draws: a branch that used F free draws spawns, for
  // each position past its prescribed prefix, the pattern that turns right
  // there.
  std::vector<std::vector<Side>> pending{{}};
  while (!pending.empty()) {
    std::vector<Side> prefix = std::move(pending.back());
    pending.pop_back();
    std::size_t used = 0;
    BranchReport b = RunBranch(spec, rounds, step_cap, prefix, used);
    for (std::size_t j = prefix.size(); j < used; ++j) {
      std::vector<Side> next = prefix;
      next.resize(j, Side::kLeft);
      next.push_back(Side::kRight);
      pending.push_back(std::move(next));
    }
    if (report.branches.size() + pending.size() > 64) {
      throw CapExceeded("verification branches on more than 64 draw patterns");
    }
    if (b.passed()) report.setup_probability += b.probability;
    report.branches.push_back(std::move(b));
  }
  std::sort(report.branches.begin(), report.branches.end(),
            [](const BranchReport& a, const BranchReport& b) { return a.choices < b.choices; });
  return report;
}

nlohmann::ordered_json ToJson(const Isomorphism& iso) {
  nlohmann::ordered_json j;
  j["forks"] = iso.map.fork;
  j["philosophers"] = iso.map.philosopher;
  std::vector<int> swapped;
  for (std::size_t p = 0; p < iso.swapped.size(); ++p) {
    if (iso.swapped[p]) swapped.push_back(static_cast<int>(p));
  }
  j["sides_swapped"] = swapped;
  return j;
}

nlohmann::ordered_json VerifyReport::ToJson() const {
  nlohmann::ordered_json j;
  j["strategy"] = strategy;
  j["topology"] = topology;
  j["algorithm"] = algorithm;
  j["rounds"] = rounds;
  j["passed"] = passed();
  j["setup_probability"] = dpsim::ToString(setup_probability);
  j["setup_probability_value"] = dpsim::ToDouble(setup_probability);
  auto& arr = j["branches"] = nlohmann::ordered_json::array();
  for (const BranchReport& b : branches) {
    nlohmann::ordered_json jb;
    std::vector<std::string> choices;
    for (Side s : b.choices) choices.push_back(dpsim::ToString(s));
    jb["free_draws"] = choices;
    jb["probability"] = dpsim::ToString(b.probability);
    jb["forced_draws"] = b.forced_draws;
    jb["stubborn_draws"] = b.stubborn_draws;
    jb["setup_end"] = b.setup_end;
    jb["in_scope_eats"] = b.in_scope_eats;
    jb["passed"] = b.passed();
    if (!b.passed()) jb["failure"] = b.failure;
    auto& jr = jb["rounds"] = nlohmann::ordered_json::array();
    for (const RoundCheck& rc : b.rounds) {
      nlohmann::ordered_json r;
      r["round"] = rc.round;
      r["start"] = rc.start;
      r["end"] = rc.end;
      r["isomorphic"] = rc.mapping.has_value();
      if (rc.mapping) r["mapping"] = dpsim::ToJson(*rc.mapping);
      r["out_of_scope_eats"] = rc.out_of_scope_eats;
      r["guest_books_empty"] = rc.guest_books_empty;
      jr.push_back(std::move(r));
    }
    arr.push_back(std::move(jb));
  }
  return j;
}

}  // namespace dpsim
