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

#ifndef DPSIM_ANALYSIS_VERIFY_HH_
#define DPSIM_ANALYSIS_VERIFY_HH_

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dpsim/analysis/isomorphism.hh"
#include "dpsim/engine.hh"

namespace dpsim {

struct RoundCheck {
  int round = 0;
  std::size_t start = 0;
  std::size_t end = 0;
  std::optional<Isomorphism> mapping;  // round end onto round start
  int out_of_scope_eats = 0;
  bool guest_books_empty = true;       // forks shared only by in-scope philosophers
};

// One outcome pattern of the free draws the script branches on.
struct BranchReport {
  std::vector<Side> choices;
  Rational probability;  // free and forced draw factors
  int forced_draws = 0;
  int stubborn_draws = 0;
  std::size_t setup_end = 0;
  std::vector<RoundCheck> rounds;
  int in_scope_eats = 0;
  std::string failure;  // empty when every check passed

  bool passed() const { return failure.empty(); }
};

struct VerifyReport {
  std::string strategy;
  std::string topology;
  std::string algorithm;
  int rounds = 0;
  std::vector<BranchReport> branches;
  // Probability that the first attempt reaches its blockade: the sum over
  // branches of the product of the bias factors of the draws the script
  // cannot retry.
  Rational setup_probability;

  bool passed() const;
  nlohmann::ordered_json ToJson() const;
};

/**
 * Runs the scripted strategy of spec.adversary (without fairization) with
 * every draw the script depends on forced its way, once for each outcome of
 * the draws it branches on, and checks that each of `rounds` rounds completes
 * with no in-scope meal and ends in a configuration isomorphic to the one it
 * started from. Draw forcing is verification instrumentation only.
 */
VerifyReport VerifyCounterexample(const RunSpec& spec, int rounds,
                                  std::size_t step_cap = 1'000'000);

nlohmann::ordered_json ToJson(const Isomorphism& iso);

}  // namespace dpsim

#endif /* DPSIM_ANALYSIS_VERIFY_HH_ */
