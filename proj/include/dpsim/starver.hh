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

#ifndef DPSIM_STARVER_HH_
#define DPSIM_STARVER_HH_

#include <optional>
#include <string>

#include "dpsim/adversary.hh"

namespace dpsim {

/**
 * Starves P1 under GDP1. P1 and P2 share fork f, and P1's other fork g carries
 * the larger nr label, so P1 always takes g first and then tests f. The
 * scheduler lets that test run only while P2 holds f, and otherwise helps P2
 * along until it does. If P2 cannot get f within `patience` steps the
 * scheduler gives in and lets P1 test anyway, which keeps it fair under any
 * algorithm.
 */
class Gdp1Starver : public Adversary {
 public:
  enum class Mode {
    // The nr ordering must hold in the initial configuration (labels forced
    // by the experiment); otherwise the strategy does not apply.
    kFixture,
    // Round robin until the ordering arises; ExperimentAborted if it has not
    // after `setup_limit` steps.
    kSetup,
    // Same schedule with no precondition, for algorithms it cannot starve.
    kAnalogue,
  };

  Gdp1Starver(PhilosopherId p1, PhilosopherId p2, Mode mode, int patience = 16,
              int setup_limit = 10000);

  PhilosopherId Next(const History& history) override;
  std::optional<std::size_t> FairnessWindow(std::size_t trace_length) const override;
  std::string name() const override;

  // True once the precondition was observed (always, outside kSetup).
  bool armed() const { return armed_; }
  // Number of times P1 was let through without P2 holding f.
  int concessions() const { return concessions_; }

 private:
  void Bind(const Configuration& c);
  bool Precondition(const Configuration& c) const;
  bool Waiting(const Configuration& c) const;
  PhilosopherId Helper(const Configuration& c) const;
  PhilosopherId RoundRobin(const Configuration& c);

  PhilosopherId p1_, p2_;
  Mode mode_;
  int patience_;
  int setup_limit_;

  bool bound_ = false;
  bool armed_ = false;
  int n_ = 0;
  ForkId f_, g_;
  int next_ = 0;
  int wait_ = 0;
  int concessions_ = 0;
};

}  // namespace dpsim

#endif /* DPSIM_STARVER_HH_ */
