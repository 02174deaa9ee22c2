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

#ifndef DPSIM_ANALYSIS_ISOMORPHISM_HH_
#define DPSIM_ANALYSIS_ISOMORPHISM_HH_

#include <cstdint>
#include <optional>
#include <vector>

#include "dpsim/protocol.hh"

namespace dpsim {

struct Isomorphism {
  Relabeling map;             // names in the first configuration -> second
  std::vector<bool> swapped;  // per philosopher of the first: sides exchanged
};

/**
 * Searches for a renaming of forks and philosophers that maps the topology of
 * a onto that of b (sides may be exchanged per philosopher) and carries the
 * state of a onto the state of b: program lines, holdings, commitments, nr
 * labels, requests, and the order of guest-book entries at each fork. Throws
 * CapExceeded after `node_cap` search nodes.
 */
std::optional<Isomorphism> ConfigurationIsomorphic(const Configuration& a, const Configuration& b,
                                                   std::uint64_t node_cap = 1'000'000);

}  // namespace dpsim

#endif /* DPSIM_ANALYSIS_ISOMORPHISM_HH_ */
