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

#ifndef DPSIM_ANALYSIS_EXPLORE_HH_
#define DPSIM_ANALYSIS_EXPLORE_HH_

#include <cstdint>
#include <vector>

#include <nlohmann/json.hpp>

#include "dpsim/protocol.hh"

namespace dpsim {

struct ExploreCaps {
  std::size_t max_states = 2'000'000;
};

struct WitnessStep {
  std::size_t state = 0;  // state index the step starts from
  StepEvent event;
};

/**
 * A fair livelock: a set of configurations in which the scheduler has, for
 * every philosopher, a step that cannot eat and keeps the system inside the
 * set whatever its random draw turns out to be. `walk` is one closed walk
 * through the set that moves every philosopher.
 */
struct Witness {
  std::size_t component_size = 0;  // configurations in the set
  Configuration start;
  std::vector<WitnessStep> walk;
};

struct ExploreReport {
  std::size_t states = 0;
  std::size_t transitions = 0;
  std::size_t components = 0;  // end components of the no-eat graph
  std::vector<Witness> witnesses;

  nlohmann::ordered_json ToJson() const;
};

/**
 * Explores every configuration reachable from `initial`, branching on the
 * scheduled philosopher and on every outcome of a random draw. Guest-book
 * entries are kept as ranks, so the state space is finite. The no-eat graph is
 * pruned to its maximal end components (a step stays only if no outcome eats
 * or leaves its strongly connected component), and one witness is reported for
 * each component in which every philosopher keeps a step. Cycles that need
 * particular draw outcomes over and over have probability zero and are not
 * witnesses. Throws CapExceeded beyond caps.max_states.
 */
ExploreReport ExploreNoEatCycles(const Configuration& initial, const ExploreCaps& caps = {});

nlohmann::ordered_json ToJson(const Configuration& c);

}  // namespace dpsim

#endif /* DPSIM_ANALYSIS_EXPLORE_HH_ */
