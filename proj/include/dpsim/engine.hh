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

#ifndef DPSIM_ENGINE_HH_
#define DPSIM_ENGINE_HH_

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dpsim/adversary.hh"
#include "dpsim/rational.hh"

namespace dpsim {

/**
 * Adversary selection. `kind` is one of round-robin, uniform-random,
 * stubborn-triangle, stubborn-pendant-ring, stubborn-theta, gdp1-starver,
 * gdp1-starver-setup or gdp1-starver-analogue. Scripted strategies take their
 * shape from the topology; the starvers take P1 and P2 in `params`.
 */
struct AdversarySpec {
  std::string kind = "round-robin";
  std::vector<int> params;
  bool fairize = false;
  // Per-round retry budget k + budget_extra; the union-bound budget if unset.
  std::optional<int> budget_extra;
  int patience = 16;
  // Overrides the seed derived from the run seed (uniform-random only).
  std::optional<std::uint64_t> seed;

  std::string Describe() const;
};

struct RunSpec {
  std::shared_ptr<const Topology> topology;
  Algorithm algorithm = Algorithm::kLR1;
  AdversarySpec adversary;
  std::uint64_t seed = 0;
  std::size_t horizon = 10000;
  int m = 0;  // nr bound; 0 means the number of forks
  int eat_steps = 1;
  HungerModel hunger;
  Rational draw_bias = Rational(1, 2);
  // Initial nr labels, one per fork. Test fixture: lets an experiment start
  // from a chosen label ordering instead of all zeros.
  std::optional<std::vector<int>> labels;

  int label_bound() const;
};

// Throws ConfigurationError when the run description cannot be carried out.
void Validate(const RunSpec& spec);

Configuration InitialConfiguration(const RunSpec& spec);

// Spec of trial t of a batch: the seed becomes DeriveSeed(seed, kTrialStream + t).
RunSpec TrialSpec(const RunSpec& base, std::size_t trial);

class ScriptedAdversary;

// The scripted strategy named by spec.adversary, unwrapped; nullptr for the
// other kinds.
std::unique_ptr<ScriptedAdversary> MakeScriptedAdversary(const RunSpec& spec);

// Adversary seed: DeriveSeed(run seed, kAdversaryStream) unless overridden.
std::unique_ptr<Adversary> MakeAdversary(const RunSpec& spec);

struct RunOptions {
  // Check protocol invariants and transition properties after every step.
  bool checked = false;
  // Called after every step; returning true ends the run early.
  std::function<bool(const History&, const Adversary&)> stop;
};

struct Trace {
  RunSpec spec;
  History history;
  std::string adversary_name;
  // Scheduling window the adversary guarantees for this trace, if any.
  std::optional<std::size_t> stated_window;
  bool stopped_early = false;

  std::size_t size() const { return history.size(); }
  const Configuration& final() const { return history.current(); }
};

Trace Run(const RunSpec& spec, RunOptions options = {});

// Runs with a caller-provided adversary and draw source.
Trace Run(const RunSpec& spec, Adversary& adversary, DrawSource& draws,
          RunOptions options = {});

// Tab-separated: step, philosopher, action, outcome, draw (or "-").
void WriteTraceTsv(const History& history, std::ostream& out);

struct FairnessViolation {
  PhilosopherId philosopher;
  std::size_t window = 0;
  // Steps [from, to) in which the philosopher was never scheduled.
  std::size_t from = 0;
  std::size_t to = 0;
};

// Every maximal stretch of at least `window` steps in which some philosopher
// is never scheduled, including stretches at the start and end of the trace.
std::vector<FairnessViolation> FairnessCheck(const History& history, std::size_t window);

struct PhilosopherMetrics {
  int eat_count = 0;
  std::optional<std::size_t> first_eat_step;  // step of the first finishEat
  // Longest stretch from a getHungry step to the step that takes the second
  // fork; a stretch still open at the end of the trace counts up to the end.
  std::size_t max_hunger = 0;
};

struct RunMetrics {
  std::vector<PhilosopherMetrics> philosophers;
  std::vector<FairnessViolation> fairness_violations;
};

// Fairness is checked against `window` when given, else against the window
// the adversary stated, else not at all.
RunMetrics Metrics(const Trace& trace, std::optional<std::size_t> window = {});

// One row per philosopher: philosopher, eat_count, first_eat_step, max_hunger.
void WriteMetricsCsv(const RunMetrics& metrics, std::ostream& out);

}  // namespace dpsim

#endif /* DPSIM_ENGINE_HH_ */
