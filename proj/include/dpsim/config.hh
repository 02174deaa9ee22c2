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

#ifndef DPSIM_CONFIG_HH_
#define DPSIM_CONFIG_HH_

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dpsim/engine.hh"

namespace dpsim {

/**
 * An experiment, read from a file of `key = value` lines. `#` starts a
 * comment. Keys:
 *
 *   command      run | estimate | verify | explore | oracle
 *   topology     ring K | doubled-triangle | ring-with-pendant K |
 *                theta L1 L2 L3 | file PATH
 *   algorithm    LR1 | LR2 | GDP1 | GDP2
 *   adversary    round-robin | uniform-random | stubborn-triangle |
 *                stubborn-pendant-ring | stubborn-theta |
 *                gdp1-starver P1 P2 | gdp1-starver-setup P1 P2 |
 *                gdp1-starver-analogue P1 P2, optionally prefixed by "fairize"
 *   budget       union-bound | linear EXTRA   (fairize retry budget)
 *   patience     starver patience (16)
 *   adversary_seed  fixed seed for uniform-random
 *   seed, trials, horizon, workers, m (number of forks), eat_steps (1),
 *   draw_bias (1/2), labels (initial nr per fork; test fixture)
 *   hunger       always | think durations per philosopher, "2,3;1;..."
 *   statistic    progress | no-eat | eat-all | eat-any   (estimate)
 *   source, target   predicates for progress (T, E)
 *   scope        philosophers for no-eat / eat-all / eat-any
 *   rounds       rounds for no-eat and verify (20 / 3)
 *   unless       "S => S2", repeatable; [*] expands over philosophers
 *   checked      true | false
 *   full_horizon true | false   (eating estimates run every trial to the horizon)
 *   oracle       distinct M K | enumerate M K | product P M | wilson S N
 *   max_states   explorer cap
 *   out          output directory (.)
 */
struct ExperimentConfig {
  std::string command;
  std::string topology_text;
  RunSpec spec;
  std::uint64_t trials = 100;
  int workers = 1;
  std::string statistic = "progress";
  std::string source = "T";
  std::string target = "E";
  std::vector<int> scope;
  std::optional<int> rounds;
  std::vector<std::pair<std::string, std::string>> unless;
  bool checked = false;
  bool full_horizon = false;
  std::vector<std::string> oracle;
  std::size_t max_states = 2'000'000;
  std::string out = ".";
};

// Throws ParseError (with the line number) or ConfigurationError.
ExperimentConfig ParseConfig(const std::string& text);
ExperimentConfig LoadConfig(const std::string& path);

// "ring 6", "theta 3 3 2", "file path", ...
std::shared_ptr<const Topology> MakeTopology(const std::string& text);

}  // namespace dpsim

#endif /* DPSIM_CONFIG_HH_ */
