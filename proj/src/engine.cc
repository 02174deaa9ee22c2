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

#include <cstdio>
#include <ostream>

#include "dpsim/error.hh"
#include "dpsim/scripted.hh"
#include "dpsim/starver.hh"

namespace dpsim {

std::string AdversarySpec::Describe() const {
  std::string s = kind;
  for (int p : params) s += " " + std::to_string(p);
  return fairize ? "fairize " + s : s;
}

int RunSpec::label_bound() const { return m > 0 ? m : topology->fork_count(); }

void Validate(const RunSpec& spec) {
  if (!spec.topology) throw ConfigurationError("no topology given");
  Validate(*spec.topology);
  if (spec.horizon < 1) throw ConfigurationError("horizon must be at least 1");
  if (spec.m < 0) throw ConfigurationError("m must be positive");
  if (spec.eat_steps < 1) throw ConfigurationError("eat_steps must be at least 1");
  if (spec.draw_bias <= 0 || spec.draw_bias >= 1) {
    throw ConfigurationError("draw_bias must lie strictly between 0 and 1, got " +
                             ToString(spec.draw_bias));
  }
  const auto& hunger = spec.hunger.think_durations;
  if (!hunger.empty() && static_cast<int>(hunger.size()) != spec.topology->philosopher_count()) {
    throw ConfigurationError("hunger lists " + std::to_string(hunger.size()) + " schedules for " +
                             std::to_string(spec.topology->philosopher_count()) + " philosophers");
  }
  if (spec.labels) {
    if (!UsesLabels(spec.algorithm)) {
      throw ConfigurationError("initial labels only apply to GDP1 and GDP2");
    }
    const int k = spec.topology->fork_count();
    if (static_cast<int>(spec.labels->size()) != k) {
      throw ConfigurationError("labels lists " + std::to_string(spec.labels->size()) +
                               " values for " + std::to_string(k) + " forks");
    }
    for (int l : *spec.labels) {
      if (l < 1 || l > spec.label_bound()) {
        throw ConfigurationError("label " + std::to_string(l) + " outside [1, " +
                                 std::to_string(spec.label_bound()) + "]");
      }
    }
  }
}

Configuration InitialConfiguration(const RunSpec& spec) {
  Validate(spec);
  ProtocolOptions options;
  options.eat_steps = spec.eat_steps;
  options.left_bias = ToDouble(spec.draw_bias);
  Configuration c =
      InitConfiguration(spec.topology, spec.algorithm, spec.label_bound(), spec.hunger, options);
  if (spec.labels) {
    for (std::size_t f = 0; f < spec.labels->size(); ++f) c.forks[f].label = (*spec.labels)[f];
  }
  return c;
}

RunSpec TrialSpec(const RunSpec& base, std::size_t trial) {
  RunSpec spec = base;
  spec.seed = DeriveSeed(base.seed, kTrialStream + trial);
  return spec;
}

namespace {

std::unique_ptr<ScriptedAdversary> BuildScript(const RunSpec& spec) {
  const AdversarySpec& a = spec.adversary;
  const Topology& t = *spec.topology;
  if (a.kind == "stubborn-triangle") return StubbornDoubledTriangle();
  if (a.kind == "stubborn-pendant-ring") {
    int k = a.params.empty() ? t.philosopher_count() - 1 : a.params[0];
    return StubbornPendantRing(k);
  }
  if (a.kind == "stubborn-theta") {
    std::vector<int> len = a.params;
    if (len.empty()) {
      len.assign(3, 0);
      if (std::sscanf(t.name().c_str(), "theta(%d,%d,%d)", &len[0], &len[1], &len[2]) != 3) {
        throw StrategyMismatch("stubborn-theta needs path lengths or a theta topology, got " +
                               t.name());
      }
    }
    if (len.size() != 3) throw ConfigurationError("stubborn-theta takes three path lengths");
    return StubbornTheta(len[0], len[1], len[2]);
  }
  return nullptr;
}

// Scripts are written for one topology; refuse a mismatch before running.
std::unique_ptr<ScriptedAdversary> MakeScript(const RunSpec& spec) {
  auto script = BuildScript(spec);
  if (script && !(script->topology() == *spec.topology)) {
    throw StrategyMismatch(script->name() + " requires topology " + script->topology().name() +
                           ", got " + spec.topology->name());
  }
  return script;
}

}  // namespace

std::unique_ptr<ScriptedAdversary> MakeScriptedAdversary(const RunSpec& spec) {
  return MakeScript(spec);
}

std::unique_ptr<Adversary> MakeAdversary(const RunSpec& spec) {
  const AdversarySpec& a = spec.adversary;
  if (auto script = MakeScript(spec)) {
    if (!a.fairize) return script;
    std::optional<StubbornnessBudget> budget;
    if (a.budget_extra) budget = StubbornnessBudget::Linear(*a.budget_extra);
    return Fairize(std::move(script), std::move(budget));
  }
  if (a.fairize) throw ConfigurationError("fairize applies to scripted strategies only");
  if (a.kind == "round-robin") return RoundRobin();
  if (a.kind == "uniform-random") {
    return UniformRandom(a.seed ? *a.seed : DeriveSeed(spec.seed, kAdversaryStream));
  }
  if (a.kind == "gdp1-starver" || a.kind == "gdp1-starver-setup" ||
      a.kind == "gdp1-starver-analogue") {
    int p1 = a.params.size() > 0 ? a.params[0] : 0;
    int p2 = a.params.size() > 1 ? a.params[1] : 1;
    auto mode = a.kind == "gdp1-starver"        ? Gdp1Starver::Mode::kFixture
                : a.kind == "gdp1-starver-setup" ? Gdp1Starver::Mode::kSetup
                                                 : Gdp1Starver::Mode::kAnalogue;
    return std::make_unique<Gdp1Starver>(PhilosopherId(p1), PhilosopherId(p2), mode, a.patience);
  }
  throw ConfigurationError(
      "unknown adversary '" + a.kind +
      "'; available: round-robin, uniform-random, stubborn-triangle, stubborn-pendant-ring, "
      "stubborn-theta, gdp1-starver, gdp1-starver-setup, gdp1-starver-analogue");
}

Trace Run(const RunSpec& spec, RunOptions options) {
  auto adversary = MakeAdversary(spec);
  StreamDraws draws(spec.seed, spec.topology->philosopher_count());
  return Run(spec, *adversary, draws, std::move(options));
}

Trace Run(const RunSpec& spec, Adversary& adversary, DrawSource& draws, RunOptions options) {
  Trace trace{spec, History(InitialConfiguration(spec)), adversary.name(), std::nullopt, false};
  History& h = trace.history;
  if (options.checked) CheckInvariants(h.current());
  while (h.size() < spec.horizon) {
    PhilosopherId p = adversary.Next(h);
    if (options.checked) {
      Configuration before = h.current();
      const StepEvent& e = h.Advance(p, draws);
      CheckInvariants(h.current());
      CheckTransition(before, h.current(), e);
    } else {
      h.Advance(p, draws);
    }
    if (options.stop && options.stop(h, adversary)) {
      trace.stopped_early = true;
      break;
    }
  }
  trace.stated_window = adversary.FairnessWindow(h.size());
  return trace;
}

void WriteTraceTsv(const History& history, std::ostream& out) {
  std::size_t step = 0;
  for (const StepEvent& e : history.events()) {
    out << step++ << '\t' << e.actor.value() << '\t' << ToString(e.action) << '\t' << e.Outcome()
        << '\t' << e.DrawText() << '\n';
  }
}

std::vector<FairnessViolation> FairnessCheck(const History& history, std::size_t window) {
  if (window < 1) throw ConfigurationError("fairness window must be at least 1");
  const int n = history.current().n();
  const std::size_t length = history.size();
  // One past the last step at which each philosopher was scheduled.
  std::vector<std::size_t> since(n, 0);
  std::vector<FairnessViolation> out;
  auto gap = [&](int p, std::size_t to) {
    if (to - since[p] >= window) out.push_back({PhilosopherId(p), window, since[p], to});
  };
  std::size_t step = 0;
  for (const StepEvent& e : history.events()) {
    int p = e.actor.value();
    gap(p, step);
    since[p] = ++step;
  }
  for (int p = 0; p < n; ++p) gap(p, length);
  return out;
}

RunMetrics Metrics(const Trace& trace, std::optional<std::size_t> window) {
  const History& h = trace.history;
  const int n = h.current().n();
  RunMetrics m;
  m.philosophers.resize(n);
  std::vector<std::optional<std::size_t>> hungry_since(n);
  std::size_t step = 0;
  for (const StepEvent& e : h.events()) {
    PhilosopherMetrics& pm = m.philosophers[e.actor.index()];
    auto& since = hungry_since[e.actor.index()];
    if (e.action == Action::kGetHungry) {
      since = step;
    } else if (e.action == Action::kTestAndTakeSecond && e.success && since) {
      pm.max_hunger = std::max(pm.max_hunger, step - *since);
      since.reset();
    } else if (IsEatingEvent(e)) {
      if (pm.eat_count++ == 0) pm.first_eat_step = step;
    }
    ++step;
  }
  for (int p = 0; p < n; ++p) {
    if (hungry_since[p]) {
      m.philosophers[p].max_hunger = std::max(m.philosophers[p].max_hunger, step - *hungry_since[p]);
    }
  }
  if (!window) window = trace.stated_window;
  if (window) m.fairness_violations = FairnessCheck(h, *window);
  return m;
}

void WriteMetricsCsv(const RunMetrics& metrics, std::ostream& out) {
  out << "philosopher,eat_count,first_eat_step,max_hunger\n";
  for (std::size_t p = 0; p < metrics.philosophers.size(); ++p) {
    const PhilosopherMetrics& pm = metrics.philosophers[p];
    out << p << ',' << pm.eat_count << ','
        << (pm.first_eat_step ? std::to_string(*pm.first_eat_step) : "") << ','
        << pm.max_hunger << '\n';
  }
}

}  // namespace dpsim
