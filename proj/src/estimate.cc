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

#include "dpsim/analysis/estimate.hh"

#include <algorithm>

#include "dpsim/error.hh"
#include "dpsim/scripted.hh"

namespace dpsim {

namespace {

std::vector<UnlessMonitor> Monitors(const EstimateOptions& options) {
  std::vector<UnlessMonitor> out;
  for (const auto& [s, s2] : options.unless) out.emplace_back(s, s2);
  return out;
}

bool AllHold(const std::vector<UnlessMonitor>& monitors) {
  return std::all_of(monitors.begin(), monitors.end(),
                     [](const UnlessMonitor& m) { return m.holds(); });
}

const ScriptedAdversary* ScriptOf(const Adversary& a) {
  if (auto* f = dynamic_cast<const FairizedAdversary*>(&a)) return &f->inner();
  return dynamic_cast<const ScriptedAdversary*>(&a);
}

// Longest stretch of steps in which philosopher p is not scheduled, for
// every p; stretches at the start and end count.
std::vector<std::size_t> Gaps(const History& h) {
  const int n = h.current().n();
  std::vector<std::size_t> since(n, 0), out;
  std::size_t step = 0;
  for (const StepEvent& e : h.events()) {
    out.push_back(step - since[e.actor.index()]);
    since[e.actor.index()] = ++step;
  }
  for (int p = 0; p < n; ++p) out.push_back(step - since[p]);
  return out;
}

}  // namespace

EstimateReport EstimateProgress(const ProgressStatement& statement, const RunSpec& spec,
                                std::uint64_t trials, std::size_t horizon,
                                const EstimateOptions& options) {
  struct Outcome {
    bool reached = false;
    bool success = false;
    bool unless_ok = true;
  };
  auto outcomes = ParallelMap(trials, options.workers, [&](std::size_t t) {
    RunSpec ts = TrialSpec(spec, t);
    ts.horizon = spec.horizon + horizon;
    Outcome out;
    std::vector<UnlessMonitor> monitors = Monitors(options);
    std::size_t start = 0;
    // Returns true when the trial is decided.
    auto observe = [&](const Configuration& c, std::size_t step) {
      for (auto& m : monitors) m.Observe(c);
      if (!out.reached) {
        if (!statement.source(c)) return step >= spec.horizon;
        out.reached = true;
        start = step;
      }
      if (statement.target(c)) {
        out.success = true;
        return true;
      }
      return step - start >= horizon;
    };
    if (!observe(InitialConfiguration(ts), 0)) {
      RunOptions ro;
      ro.checked = options.checked;
      ro.stop = [&](const History& h, const Adversary&) { return observe(h.current(), h.size()); };
      Run(ts, ro);
    }
    out.unless_ok = AllHold(monitors);
    return out;
  });

  EstimateReport r;
  r.source = statement.source.name;
  r.target = statement.target.name;
  r.horizon = horizon;
  for (const Outcome& o : outcomes) {
    if (!o.reached) {
      ++r.skipped;
      continue;
    }
    ++r.trials;
    if (o.success) ++r.successes;
    if (!o.unless_ok) ++r.unless_failures;
  }
  r.estimate = r.trials ? static_cast<double>(r.successes) / static_cast<double>(r.trials) : 0;
  r.ci = Wilson(r.successes, r.trials);
  return r;
}

NoProgressReport EstimateNoProgress(const RunSpec& spec, std::uint64_t trials,
                                    const NoProgressOptions& options) {
  struct Outcome {
    bool success = false;
    int rounds = 0;
    std::size_t longest = 0;
    std::size_t pair = 0;
    std::vector<std::size_t> gaps;  // scheduling gaps at least `pair` long
    std::size_t max_gap = 0;
    std::uint64_t guest_book_violations = 0;
  };
  auto outcomes = ParallelMap(trials, options.workers, [&](std::size_t t) {
    RunSpec ts = TrialSpec(spec, t);
    auto adversary = MakeAdversary(ts);
    const ScriptedAdversary* script = ScriptOf(*adversary);
    if (!script) {
      throw ConfigurationError("no-progress estimates need a scripted adversary, got " +
                               adversary->name());
    }
    const Topology& topo = *ts.topology;
    std::vector<bool> in_scope(topo.philosopher_count(), options.scope.empty());
    for (PhilosopherId p : options.scope) in_scope.at(p.index()) = true;
    if (options.scope.empty()) {
      for (int p = 0; p < topo.philosopher_count(); ++p) {
        in_scope[p] = script->InScope(PhilosopherId(p));
      }
    }
    std::vector<ForkId> watched;  // forks used only by in-scope philosophers
    for (int f = 0; f < topo.fork_count(); ++f) {
      auto inc = topo.incident(ForkId(f));
      if (std::all_of(inc.begin(), inc.end(), [&](PhilosopherId q) { return in_scope[q.index()]; })) {
        watched.push_back(ForkId(f));
      }
    }

    Outcome out;
    bool ate = false;
    int seen_rounds = 0;
    RunOptions ro;
    ro.checked = options.checked;
    ro.stop = [&](const History& h, const Adversary&) {
      const StepEvent& e = h.events().back();
      if (IsEatingEvent(e) && in_scope[e.actor.index()]) {
        ate = true;
        return true;
      }
      while (seen_rounds < script->completed_rounds()) {
        ++seen_rounds;
        for (ForkId f : watched) {
          const auto& book = h.current().fork(f).last_use;
          if (std::any_of(book.begin(), book.end(), [](std::uint64_t v) { return v != 0; })) {
            ++out.guest_book_violations;
            break;
          }
        }
      }
      return seen_rounds >= options.rounds;
    };
    StreamDraws draws(ts.seed, topo.philosopher_count());
    Trace trace = Run(ts, *adversary, draws, ro);
    out.success = !ate;
    out.rounds = script->completed_rounds();
    for (const RoundRecord& r : script->rounds()) {
      std::size_t end = r.end ? r.end : trace.size();
      out.longest = std::max(out.longest, end - r.start);
    }
    out.pair = RoundPairWindow(script->rounds(), trace.size());
    for (std::size_t g : Gaps(trace.history)) {
      out.max_gap = std::max(out.max_gap, g);
      if (g >= out.pair) out.gaps.push_back(g);
    }
    return out;
  });

  NoProgressReport r;
  r.trials = trials;
  for (const Outcome& o : outcomes) {
    if (o.success) ++r.successes;
    r.rounds_completed += o.rounds;
    r.max_half_round = std::max(r.max_half_round, o.longest);
    r.max_full_round = std::max(r.max_full_round, o.pair);
    r.max_gap = std::max(r.max_gap, o.max_gap);
    r.guest_book_violations += o.guest_book_violations;
  }
  for (const Outcome& o : outcomes) {
    for (std::size_t g : o.gaps) {
      if (g >= r.max_full_round) ++r.fairness_violations;
    }
  }
  r.estimate = trials ? static_cast<double>(r.successes) / static_cast<double>(trials) : 0;
  r.ci = Wilson(r.successes, trials);
  return r;
}

EatReport EstimateEating(const RunSpec& spec, std::uint64_t trials,
                         const std::vector<PhilosopherId>& who, bool require_all,
                         const EstimateOptions& options) {
  struct Outcome {
    bool success = false;
    bool unless_ok = true;
    std::size_t violations = 0;
    std::size_t steps = 0;
  };
  auto outcomes = ParallelMap(trials, options.workers, [&](std::size_t t) {
    RunSpec ts = TrialSpec(spec, t);
    const int n = ts.topology->philosopher_count();
    std::vector<bool> waiting(n, who.empty());
    for (PhilosopherId p : who) waiting.at(p.index()) = true;
    int left = require_all ? static_cast<int>(std::count(waiting.begin(), waiting.end(), true)) : 1;
    std::vector<UnlessMonitor> monitors = Monitors(options);
    for (auto& m : monitors) m.Observe(InitialConfiguration(ts));
    RunOptions ro;
    ro.checked = options.checked;
    ro.stop = [&](const History& h, const Adversary&) {
      for (auto& m : monitors) m.Observe(h.current());
      const StepEvent& e = h.events().back();
      if (IsEatingEvent(e) && waiting[e.actor.index()] && left > 0) {
        waiting[e.actor.index()] = false;
        --left;
      }
      return left <= 0 && !options.full_horizon;
    };
    Trace trace = Run(ts, ro);
    Outcome out;
    out.success = left <= 0;
    out.unless_ok = AllHold(monitors);
    out.steps = trace.size();
    if (trace.stated_window) out.violations = FairnessCheck(trace.history, *trace.stated_window).size();
    return out;
  });
  EatReport r;
  r.trials = trials;
  for (const Outcome& o : outcomes) {
    if (o.success) ++r.successes;
    if (!o.unless_ok) ++r.unless_failures;
    r.fairness_violations += o.violations;
    r.max_steps = std::max(r.max_steps, o.steps);
  }
  r.estimate = trials ? static_cast<double>(r.successes) / static_cast<double>(trials) : 0;
  r.ci = Wilson(r.successes, trials);
  return r;
}

bool LemmaConsistency(const std::vector<EstimateReport>& reports, Composition composition) {
  if (reports.size() != 3) {
    throw ConfigurationError("lemma consistency takes three reports, got " +
                             std::to_string(reports.size()));
  }
  const EstimateReport &a = reports[0], &b = reports[1], &whole = reports[2];
  const double slack = a.half_width() + b.half_width() + whole.half_width();
  const double expected = composition == Composition::kConcatenation
                              ? a.estimate * b.estimate
                              : std::min(a.estimate, b.estimate);
  return whole.estimate >= expected - slack;
}

bool PersistenceWins(const EstimateReport& short_run, const EstimateReport& long_run,
                     double target) {
  if (short_run.successes == 0) return false;
  if (short_run.unless_failures != 0 || long_run.unless_failures != 0) return false;
  return long_run.estimate >= target;
}

}  // namespace dpsim
